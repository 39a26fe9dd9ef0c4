#include "cwica/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cwica/error.hpp"

namespace cwica {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw io_error("invalid numeric field: '" + token + "'");
    return v;
}

void write_matrix_csv(std::ostream& out, const Matrix& m, bool header) {
    if (header) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << 'c' << j;
        }
        out << '\n';
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(r[j]);
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, bool header) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    write_matrix_csv(f, m, header);
    if (!f) throw io_error("write failed: " + path.string());
}

Matrix read_matrix_csv(std::istream& in, bool header) {
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    bool skip = header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (skip) {
            skip = false;
            continue;
        }
        std::size_t ncols = 0, pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos);
            values.push_back(parse_double(tok));
            ++ncols;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols == 0)
            cols = ncols;
        else if (ncols != cols)
            throw io_error("ragged CSV row");
        ++rows;
    }
    if (rows == 0 || cols == 0) throw io_error("empty CSV matrix");
    Matrix m(rows, cols);
    m.data() = std::move(values);
    return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path, bool header) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path.string());
    return read_matrix_csv(f, header);
}

} // namespace cwica
