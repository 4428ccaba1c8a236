#pragma once

#include <stdexcept>
#include <string>

namespace survc {

/// Invalid or unparsable input data (files, schemas, dimension mismatches).
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Estimation is undefined on the given input (e.g. no usable pairs).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace survc
