#include "lpslab/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace lpslab {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw std::runtime_error("fmt: conversion failed");
    return std::string(buf, res.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::invalid_argument("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\n\"") != std::string::npos)
            throw std::invalid_argument("CsvWriter: cell contains a delimiter: " + cells[i]);
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace lpslab
