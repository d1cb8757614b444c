#include "numline/cli.hpp"

int main(int argc, char** argv) { return numline::dispatch(argc, argv); }
