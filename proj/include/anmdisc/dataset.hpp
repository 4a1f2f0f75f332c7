#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anmdisc/graph.hpp"

namespace anmdisc {

/// n x d numeric sample with column names. Values are finite.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::MatrixXd values, std::vector<std::string> names);

    int num_rows() const { return static_cast<int>(values_.rows()); }
    int num_cols() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }

    Eigen::VectorXd column(Node i) const { return values_.col(i); }
    /// Columns of `s` in ascending index order.
    Eigen::MatrixXd columns(NodeSet s) const;
    int index_of(const std::string& name) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

/// Default names X1..Xd.
std::vector<std::string> default_names(int d);

/// Parse comma-separated text with a mandatory header row. Errors carry row/column.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
/// Writes values with 17 significant digits so they round-trip exactly.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

}  // namespace anmdisc
