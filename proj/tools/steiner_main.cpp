#include "steiner/app.hpp"

int main(int argc, char** argv) { return steiner::run_cli(argc, argv); }
