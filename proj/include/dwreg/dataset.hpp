#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dwreg {

inline constexpr const char* kInterceptName = "(Intercept)";

/// Count response with an n x P covariate matrix. The design matrix prepends
/// an intercept column unless add_intercept is false.
///
/// Construction throws DataError for negative counts, non-finite covariates,
/// mismatched dimensions, an empty dataset, or a design without full column
/// rank (the message names the dependent columns).
class Dataset {
 public:
  Dataset(std::vector<std::int64_t> response, Eigen::MatrixXd covariates,
          std::vector<std::string> covariate_names, bool add_intercept = true);

  /// Response with only an intercept column.
  static Dataset intercept_only(std::vector<std::int64_t> response);

  const std::vector<std::int64_t>& response() const noexcept { return response_; }
  const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }
  bool has_intercept() const noexcept { return add_intercept_; }

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const std::vector<std::string>& design_names() const noexcept { return design_names_; }

  std::size_t size() const noexcept { return response_.size(); }
  std::size_t covariate_count() const noexcept { return covariate_names_.size(); }
  std::size_t design_width() const noexcept { return design_names_.size(); }

 private:
  std::vector<std::int64_t> response_;
  Eigen::MatrixXd covariates_;
  std::vector<std::string> covariate_names_;
  bool add_intercept_;
  Eigen::MatrixXd design_;
  std::vector<std::string> design_names_;
};

/// Builds a design row (intercept first when requested) from raw covariates.
Eigen::VectorXd design_row(std::span<const double> covariates, bool add_intercept);

}  // namespace dwreg
