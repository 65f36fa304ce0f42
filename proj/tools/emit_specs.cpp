// Regenerates docs/classes/*.spec from the builtin class definitions.
// Usage: emit_specs <output-directory>

#include "subcrit/classes.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: emit_specs <output-directory>\n";
        return 2;
    }
    std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    for (const auto& [name, contents] : subcrit::builtin_spec_files()) {
        std::ofstream out(dir / name);
        out << contents;
        if (!out) {
            std::cerr << "failed to write " << (dir / name).string() << "\n";
            return 1;
        }
        std::cout << (dir / name).string() << "\n";
    }
    return 0;
}
