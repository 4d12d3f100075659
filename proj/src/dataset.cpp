#include "affw/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <vector>

namespace affw {

Dataset synthesize_dataset(Eigen::Index n, Eigen::Index d, DatasetKind kind,
                           std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw DataError("synthesize_dataset: need n >= 1 and d >= 1");
  }
  Rng rng(seed);
  Dataset data;
  data.features.resize(n, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = normal(rng);
  }
  const Vector w = random_gaussian(rng, d) / std::sqrt(static_cast<double>(d));
  const double noise = kind == DatasetKind::regression ? 0.1 : 1.0;
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = data.features.row(i).dot(w) + noise * normal(rng);
    data.labels[i] =
        kind == DatasetKind::regression ? s : (s >= 0.0 ? 1.0 : -1.0);
  }
  data.domain = kind == DatasetKind::regression ? LabelDomain::real
                                                : LabelDomain::binary;
  data.provenance = SyntheticSource{seed};
  return data;
}

void validate_labels(const Dataset& data) {
  if (data.labels.size() != data.features.rows()) {
    throw DataError("dataset: label count does not match feature rows");
  }
  for (Eigen::Index i = 0; i < data.labels.size(); ++i) {
    const double y = data.labels[i];
    if (!std::isfinite(y)) {
      throw DataError("dataset: non-finite label at row " +
                      std::to_string(i + 1));
    }
    if (data.domain == LabelDomain::binary && y != 1.0 && y != -1.0) {
      throw DataError("dataset: label at row " + std::to_string(i + 1) +
                      " is not in {-1, +1}");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Dataset load_dataset_csv(const std::filesystem::path& path,
                         const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset: cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && options.skip_header) continue;
    if (trim(line).empty()) continue;

    std::vector<double> row;
    std::string_view rest(line);
    std::size_t col = 0;
    for (;;) {
      ++col;
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() ||
          ptr != cell.data() + cell.size()) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": column " + std::to_string(col) +
                        ": not a number: '" + std::string(cell) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() < 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": need at least one feature and one label column");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(width) +
                      " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("dataset: " + path.string() + " is empty");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.features.resize(n, d);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) {
      data.features(i, j) = r[static_cast<std::size_t>(j)];
    }
    data.labels[i] = r.back();
  }
  data.domain = options.domain;
  data.provenance = FileSource{path};
  validate_labels(data);
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("dataset: cannot write " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      out << data.features(i, j) << ',';
    }
    out << data.labels[i] << '\n';
  }
}

}  // namespace affw
