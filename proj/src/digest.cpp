#include "afmpi/digest.hpp"
#include "afmpi/error.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace afmpi {

std::string to_hex(std::uint64_t value) {
    static constexpr std::array<char, 16> digits{'0', '1', '2', '3', '4', '5', '6', '7',
                                                 '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xFU];
        value >>= 4U;
    }
    return out;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw Error{ErrorCode::Io, "cannot open " + path.string(), {"open"},
                    {{"path", path.string()}}};
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::uint64_t file_digest(const std::filesystem::path &path) { return fnv1a64(read_file(path)); }

} // namespace afmpi
