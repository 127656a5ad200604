#pragma once

#include <string>
#include <vector>

#include "mcfh/grid.hpp"

namespace mcfh {

// 16-bit P5 PGM of the field rescaled to [0, 65535], plus a JSON sidecar
// (same path with .json appended) recording min/max/time for reconstruction.
void write_pgm16(const std::string& path, const LevelSetField& field);
void write_pgm16(const std::string& path, const std::vector<double>& values,
                 int width, int height, double time);

// CSV with a fixed header; rows formatted with %.12g for byte-stable output.
struct CsvWriter {
    explicit CsvWriter(const std::string& path, const std::string& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);
  private:
    struct Impl;
    Impl* impl;
};

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mcfh
