#include "rfilt/cli.hpp"

int main(int argc, char** argv) { return rfilt::main_entry(argc, argv); }
