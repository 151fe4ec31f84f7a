#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace peergraph {

// Calendar date of a snapshot. Stored as days since 1970-01-01.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}

  // Parses "YYYY-MM-DD"; throws ParseError on anything else.
  static Date parse(std::string_view text);

  std::chrono::sys_days days() const { return days_; }
  double day_number() const { return static_cast<double>(days_.time_since_epoch().count()); }
  std::string str() const;

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace peergraph
