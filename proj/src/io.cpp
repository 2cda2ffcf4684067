#include "yada/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace yada {

std::string read_file(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw FileError("file not found: " + path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileError("cannot open: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FileError("cannot write: " + path);
    }
    out << contents;
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

}  // namespace yada
