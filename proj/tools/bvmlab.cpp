#include "bvmlab/cli.hpp"

int main(int argc, char** argv) { return bvmlab::dispatch(argc, argv); }
