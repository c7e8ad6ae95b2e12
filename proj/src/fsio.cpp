#include "debate/fsio.hpp"

#include <fstream>
#include <sstream>

namespace debate {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream content;
    content << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return content.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + temp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("cannot write " + temp.string());
    }
    std::filesystem::rename(temp, path, ec);
    if (ec) throw IoError("cannot rename " + temp.string() + " to " + path.string() + ": " +
                          ec.message());
}

}  // namespace debate
