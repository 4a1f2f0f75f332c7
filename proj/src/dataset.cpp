#include "anmdisc/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace anmdisc {

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (static_cast<std::size_t>(values_.cols()) != names_.size())
        throw std::invalid_argument("Dataset: column count does not match names");
    if (values_.cols() > kMaxNodes) throw std::invalid_argument("Dataset: at most 64 columns");
    if (!values_.allFinite()) throw std::invalid_argument("Dataset: values must be finite");
}

Eigen::MatrixXd Dataset::columns(NodeSet s) const {
    const auto idx = s.to_vector();
    Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= num_cols()) throw std::out_of_range("Dataset::columns: node out of range");
        out.col(static_cast<Eigen::Index>(k)) = values_.col(idx[k]);
    }
    return out;
}

int Dataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown column '" + name + "'");
}

std::vector<std::string> default_names(int d) {
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("X" + std::to_string(i));
    return names;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

}  // namespace

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV: missing header row");
    std::vector<std::string> names;
    for (auto& f : split_fields(line)) names.push_back(strip(f));
    for (std::size_t c = 0; c < names.size(); ++c)
        if (names[c].empty()) throw std::runtime_error("CSV: empty column name at column " + std::to_string(c + 1));

    std::vector<std::vector<double>> rows;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (strip(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != names.size())
            throw std::runtime_error("CSV: row " + std::to_string(row_no) + " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(names.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string cell = strip(fields[c]);
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, row[c]);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(row[c]))
                throw std::runtime_error("CSV: non-numeric value '" + cell + "' at row " + std::to_string(row_no) +
                                         ", column " + std::to_string(c + 1) + " (" + names[c] + ")");
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < names.size(); ++c) values(r, c) = rows[r][c];
    return Dataset(std::move(values), std::move(names));
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    const auto& names = data.names();
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    out << std::setprecision(17);
    const auto& v = data.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) out << (c ? "," : "") << v(r, c);
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, data);
}

}  // namespace anmdisc
