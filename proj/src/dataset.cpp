#include "dwreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dwreg/error.hpp"

namespace dwreg {

Dataset::Dataset(std::vector<std::int64_t> response, Eigen::MatrixXd covariates,
                 std::vector<std::string> covariate_names, bool add_intercept)
    : response_(std::move(response)),
      covariates_(std::move(covariates)),
      covariate_names_(std::move(covariate_names)),
      add_intercept_(add_intercept) {
  const auto n = static_cast<Eigen::Index>(response_.size());
  if (n == 0) throw DataError("empty dataset");
  if (covariates_.cols() == 0) covariates_.resize(n, 0);
  if (covariates_.rows() != n) {
    throw DataError("covariate matrix has " + std::to_string(covariates_.rows()) + " rows but the response has " +
                    std::to_string(n));
  }
  if (static_cast<Eigen::Index>(covariate_names_.size()) != covariates_.cols()) {
    throw DataError("expected " + std::to_string(covariates_.cols()) + " covariate names, got " +
                    std::to_string(covariate_names_.size()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (response_[static_cast<std::size_t>(i)] < 0) {
      throw DataError("negative count in response at row " + std::to_string(i + 1));
    }
  }
  if (!covariates_.allFinite()) throw DataError("covariates contain missing or non-finite values");

  const Eigen::Index width = covariates_.cols() + (add_intercept_ ? 1 : 0);
  if (width == 0) throw DataError("design matrix has no columns");
  design_.resize(n, width);
  if (add_intercept_) {
    design_.col(0).setOnes();
    design_names_.emplace_back(kInterceptName);
  }
  design_.rightCols(covariates_.cols()) = covariates_;
  design_names_.insert(design_names_.end(), covariate_names_.begin(), covariate_names_.end());

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_);
  qr.setThreshold(1e-10);
  if (qr.rank() < width) {
    std::string dependent;
    const auto& permutation = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < width; ++k) {
      if (!dependent.empty()) dependent += ", ";
      dependent += design_names_[static_cast<std::size_t>(permutation(k))];
    }
    throw DataError("rank-deficient design matrix: column(s) " + dependent +
                    " are linearly dependent on the others");
  }
}

Dataset Dataset::intercept_only(std::vector<std::int64_t> response) {
  const auto n = static_cast<Eigen::Index>(response.size());
  return Dataset(std::move(response), Eigen::MatrixXd(n, 0), {}, true);
}

Eigen::VectorXd design_row(std::span<const double> covariates, bool add_intercept) {
  const auto offset = add_intercept ? 1 : 0;
  Eigen::VectorXd row(static_cast<Eigen::Index>(covariates.size()) + offset);
  if (add_intercept) row(0) = 1.0;
  for (std::size_t j = 0; j < covariates.size(); ++j) row(static_cast<Eigen::Index>(j) + offset) = covariates[j];
  return row;
}

}  // namespace dwreg
