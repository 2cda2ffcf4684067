#pragma once

#include <stdexcept>
#include <string>

namespace yada {

/// Missing or unreadable input file.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace yada
