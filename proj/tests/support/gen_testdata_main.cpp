#include <cstdlib>
#include <iostream>
#include <string>

#include "support/zinclike.hpp"

// usage: gen-testdata <path> <count> <seed>
int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: gen-testdata <path> <count> <seed>\n";
    return 2;
  }
  fraggen::testsupport::write_corpus(argv[1], std::atoi(argv[2]),
                                     std::strtoull(argv[3], nullptr, 10));
  return 0;
}
