#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace vem {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
template <class... Args>
[[noreturn]] void fail(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  throw Error(os.str());
}
}  // namespace detail

}  // namespace vem

#define VEM_REQUIRE(cond, ...) \
  do {                         \
    if (!(cond)) ::vem::detail::fail(__VA_ARGS__); \
  } while (0)
