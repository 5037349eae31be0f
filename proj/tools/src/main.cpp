#include "tcsel/cli/app.hpp"

int main(int argc, char** argv) { return tcsel::cli::run(argc, argv); }
