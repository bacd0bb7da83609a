#include <malloc.h>

#include <iostream>

#include "explore/cli.hpp"

int main(int argc, char** argv) {
  // Batched Eigen temporaries are reallocated every step; keep them off mmap.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  return explore::run_cli(argc, argv, std::cout, std::cerr);
}
