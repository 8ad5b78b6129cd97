#include "router/commands.hpp"

int main(int argc, char** argv) { return router::cli_main(argc, argv); }
