#include "dexfit/cli.hpp"

int main(int argc, char** argv) { return dexfit::dispatch(argc, argv); }
