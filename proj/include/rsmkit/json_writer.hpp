#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rsmkit/linalg.hpp"

namespace rsm {

/// Streaming JSON emitter for reports. Keys keep insertion order, objects
/// are pretty-printed, arrays stay on one line, and every real number is
/// written with 17 significant digits so parsing the report back yields
/// bit-identical doubles. Output for identical inputs is byte-identical.
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(std::string_view name);

  void value(double number);
  void value(int number) { value(static_cast<std::int64_t>(number)); }
  void value(std::int64_t number);
  void value(std::uint64_t number);
  void value(bool flag);
  void value(std::string_view text);
  void value(const char* text) { value(std::string_view(text)); }
  void null();

  void value(const Vector& numbers);
  /// Row-major array of row arrays.
  void value(const Matrix& numbers);

  /// Finished document plus trailing newline.
  std::string str() const;

 private:
  void prepare_slot();
  void newline();

  std::string out_;
  std::vector<bool> has_items_;   // per open container
  std::vector<bool> is_object_;   // per open container
  bool pending_key_ = false;
};

/// %.17g rendering used for every numeric cell the tool emits.
std::string format_number(double number);

}  // namespace rsm
