#pragma once

#include <stdexcept>

namespace alex {

class duplicate_key_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace alex
