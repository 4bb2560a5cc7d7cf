#include "pipeline.hpp"

int main(int argc, char** argv) { return sofent::cli::main_entry(argc, argv); }
