// Writes (or checks) the mini-fixture golden files from the oracle.
//
//   make_goldens <fixture_dir> <golden_dir>           write
//   make_goldens <fixture_dir> <golden_dir> --check   compare, exit 1 on drift

#include "golden_builder.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace afmpi;
namespace fs = std::filesystem;

int main(int argc, char **argv) {
    CLI::App app{"regenerate mini-fixture goldens from the oracle"};
    std::string fixture_dir, golden_dir;
    bool check = false;
    app.add_option("fixture_dir", fixture_dir)->required();
    app.add_option("golden_dir", golden_dir)->required();
    app.add_flag("--check", check, "compare instead of writing");
    CLI11_PARSE(app, argc, argv);

    try {
        int drift = 0;
        for (const auto &[rel, content] : testkit::oracle_goldens(fixture_dir)) {
            const auto path = fs::path{golden_dir} / rel;
            if (check) {
                if (!fs::exists(path) || read_file(path) != content) {
                    std::cerr << "golden differs from oracle: " << rel << '\n';
                    ++drift;
                }
                continue;
            }
            fs::create_directories(path.parent_path());
            report::write_text(path, content);
            std::cout << "wrote " << path.string() << '\n';
        }
        return drift == 0 ? 0 : 1;
    } catch (const std::exception &e) {
        std::cerr << "make_goldens: " << e.what() << '\n';
        return 2;
    }
}
