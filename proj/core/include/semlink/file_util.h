#ifndef SEMLINK_FILE_UTIL_H_
#define SEMLINK_FILE_UTIL_H_

#include <string>
#include <string_view>

namespace semlink {

// Reads a whole file. Throws IoError.
std::string read_file(const std::string &path);

// Writes `contents` to `path` through "<path>.partial" and a rename, so a
// failed write never leaves a truncated file under the final name.
void write_file(const std::string &path, std::string_view contents);

// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::string &path);

}  // namespace semlink

#endif  // SEMLINK_FILE_UTIL_H_
