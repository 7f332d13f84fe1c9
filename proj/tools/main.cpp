#include "codeclass/cli.hpp"

int main(int argc, char** argv) { return codeclass::run(argc, argv); }
