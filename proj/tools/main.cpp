#include <iostream>

#include "shrinkprior/cli.hpp"

int main(int argc, char** argv) {
  return shrinkprior::cli::dispatch(argc, argv, std::cout, std::cerr);
}
