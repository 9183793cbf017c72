#include <iostream>

#include "windsteer/cli/dispatch.hpp"

int main(int argc, char** argv) {
  return windsteer::cli::dispatch(argc, argv, std::cout, std::cerr);
}
