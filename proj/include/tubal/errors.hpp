#pragma once
#include <stdexcept>

namespace tubal {

// Error taxonomy; the CLI maps these onto its exit-code contract.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct shape_error : error {
  using error::error;
};
struct config_error : error {
  using error::error;
};
struct format_error : error {
  using error::error;
};
struct numeric_error : error {
  using error::error;
};
struct io_error : error {
  using error::error;
};

}  // namespace tubal
