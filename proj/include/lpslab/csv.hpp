#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lpslab {

/// Shortest round-trip decimal with '.' separator, independent of the global locale.
std::string fmt(double v);
std::string fmt(long long v);

/** Builds CSV text: ',' delimiter, LF line endings, header on line 1. */
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }
    std::size_t columns() const { return cols_; }

private:
    std::string text_;
    std::size_t cols_;
};

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

} // namespace lpslab
