#include "harness/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mom::harness {

namespace {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_cell(const Cell& cell) {
    if (const auto* i = std::get_if<long>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::get<std::string>(cell);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

Cell parse_cell(const std::string& field) {
    if (!field.empty()) {
        long i = 0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), i);
        if (ec == std::errc() && p == field.data() + field.size()) return Cell{i};
        double d = 0.0;
        auto [pd, ecd] = std::from_chars(field.data(), field.data() + field.size(), d);
        if (ecd == std::errc() && pd == field.data() + field.size()) return Cell{d};
        if (field == "nan") return Cell{std::nan("")};
    }
    return Cell{field};
}

}  // namespace

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ',';
            out << format_cell(row[c]);
        }
        out << '\n';
    }
    return out.str();
}

void write_results(const std::string& path, const ResultTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_csv(table);
    if (!out) throw IoError("write to '" + path + "' failed");
}

ResultTable read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    ResultTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            table.columns = split_line(line);
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != table.columns.size()) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(table.columns.size()),
                             line_no);
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(f));
        table.rows.push_back(std::move(row));
    }
    return table;
}

PairwiseDataset read_csv_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            width = split_line(line).size();
            if (width < 2) throw ParseError("need at least one feature and a label column", 1);
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != width) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(width),
                             line_no);
        }
        std::vector<double> numeric;
        numeric.reserve(width);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto& f = fields[c];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || p != f.data() + f.size()) {
                throw ParseError("non-numeric cell '" + f + "'", line_no, c + 1);
            }
            numeric.push_back(v);
        }
        rows.push_back(std::move(numeric));
    }
    if (rows.empty()) throw ParseError("no data rows", line_no == 0 ? 0 : line_no);
    PairwiseDataset data;
    const long n = static_cast<long>(rows.size());
    const long p = static_cast<long>(width) - 1;
    data.features.resize(n, p);
    data.labels.resize(n);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) {
            data.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        data.labels[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
    }
    return data;
}

}  // namespace mom::harness
