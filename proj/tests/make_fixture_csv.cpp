// Writes a small TravisTorrent-shaped CSV for the CLI smoke test.
// usage: make_fixture_csv <path> <rows> [seed] [--without-response]
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fixtures.hpp"

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::cerr << "usage: make_fixture_csv <path> <rows> [seed] [--without-response]\n";
        return 2;
    }
    const std::filesystem::path path = argv[1];
    const auto rows = std::stoul(argv[2]);
    const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 1;
    fixture::write_travis_csv(path, rows, seed);
    if (argc > 4 && std::string(argv[4]) == "--without-response") {
        // Rename the response column so the file no longer satisfies the schema.
        std::ifstream in(path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        in.close();
        std::string text = buffer.str();
        const auto pos = text.find("tr_duration");
        text.replace(pos, 11, "tr_elapsed");
        std::ofstream(path) << text;
    }
    return 0;
}
