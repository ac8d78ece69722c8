#include "twomode/run.hpp"

int main(int argc, char** argv) { return twomode::run(argc, argv); }
