#include "seisvm/matrix.hpp"

#include "seisvm/error.hpp"

namespace seisvm {

void Matrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw ValidationError("row of length " + std::to_string(values.size()) +
                          " does not match matrix width " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

}  // namespace seisvm
