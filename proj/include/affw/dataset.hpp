#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "affw/common.hpp"

namespace affw {

enum class LabelDomain { real, binary };

struct SyntheticSource {
  std::uint64_t seed;
};
struct FileSource {
  std::filesystem::path path;
};

/// Rows of `features` are the samples a_i.
struct Dataset {
  Matrix features;
  Vector labels;
  LabelDomain domain = LabelDomain::real;
  std::variant<SyntheticSource, FileSource> provenance = SyntheticSource{0};

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

enum class DatasetKind { regression, classification };

/// Gaussian features with a planted linear model w, ‖w‖ ≈ 1. Regression
/// labels are aᵀw + 0.1·noise; classification labels sign(aᵀw + noise) ∈
/// {−1, +1}, noisy enough that the classes overlap.
Dataset synthesize_dataset(Eigen::Index n, Eigen::Index d, DatasetKind kind,
                           std::uint64_t seed);

struct CsvOptions {
  bool skip_header = false;
  LabelDomain domain = LabelDomain::real;
};

/// d feature columns followed by one label column, comma separated.
/// Errors carry the 1-based line and column of the offending cell.
Dataset load_dataset_csv(const std::filesystem::path& path,
                         const CsvOptions& options = {});

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Throws DataError unless every label lies in the declared domain.
void validate_labels(const Dataset& data);

}  // namespace affw
