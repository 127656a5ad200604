#include "mcfh/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace mcfh {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_pgm16(const std::string& path, const std::vector<double>& values,
                 int width, int height, double time) {
    if (static_cast<long long>(width) * height != static_cast<long long>(values.size()))
        throw error("write_pgm16: shape mismatch");
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    double span = mx > mn ? mx - mn : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("write_pgm16: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(width) * 2);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            double v = values[static_cast<size_t>(j) * width + i];
            auto q = static_cast<std::uint16_t>(
                std::llround((v - mn) / span * 65535.0));
            row[2 * i] = static_cast<unsigned char>(q >> 8);  // big-endian per P5
            row[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw error("write_pgm16: write failed for " + path);
    nlohmann::json side;
    side["min"] = mn;
    side["max"] = mx;
    side["time"] = time;
    side["width"] = width;
    side["height"] = height;
    write_text_file(path + ".json", side.dump(2) + "\n");
}

void write_pgm16(const std::string& path, const LevelSetField& field) {
    const Grid& gr = field.grid;
    if (gr.dim == 2) {
        write_pgm16(path, field.v, gr.shape[0], gr.shape[1], field.time);
        return;
    }
    // 3D: middle slice along the second axis
    int jmid = gr.shape[1] / 2;
    std::vector<double> slice;
    slice.reserve(static_cast<size_t>(gr.shape[0]) * gr.shape[2]);
    for (int k = 0; k < gr.shape[2]; ++k)
        for (int i = 0; i < gr.shape[0]; ++i) slice.push_back(field.at(i, jmid, k));
    write_pgm16(path, slice, gr.shape[0], gr.shape[2], field.time);
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : impl(new Impl) {
    impl->out.open(path);
    if (!impl->out) {
        delete impl;
        impl = nullptr;
        throw error("CsvWriter: cannot open " + path);
    }
    impl->out << header << "\n";
}

CsvWriter::~CsvWriter() { delete impl; }

void CsvWriter::row(const std::vector<double>& values) {
    std::string line;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) line += ",";
        line += format_double(values[i]);
    }
    impl->out << line << "\n";
}

void CsvWriter::raw_row(const std::string& line) { impl->out << line << "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw error("cannot open " + path);
    out << content;
    if (!out) throw error("write failed for " + path);
}

}  // namespace mcfh
