#include "rsmkit/json_writer.hpp"

#include <cmath>
#include <cstdio>

#include "rsmkit/errors.hpp"

namespace rsm {

std::string format_number(double number) {
  if (!std::isfinite(number)) return "null";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", number);
  return buffer;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * has_items_.size(), ' ');
}

void JsonWriter::prepare_slot() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (has_items_.empty()) return;
  if (has_items_.back()) out_ += is_object_.back() ? "," : ", ";
  has_items_.back() = true;
  if (is_object_.back()) newline();
}

void JsonWriter::begin_object() {
  prepare_slot();
  out_ += '{';
  has_items_.push_back(false);
  is_object_.push_back(true);
}

void JsonWriter::end_object() {
  const bool had_items = has_items_.back();
  has_items_.pop_back();
  is_object_.pop_back();
  if (had_items) newline();
  out_ += '}';
}

void JsonWriter::begin_array() {
  prepare_slot();
  out_ += '[';
  has_items_.push_back(false);
  is_object_.push_back(false);
}

void JsonWriter::end_array() {
  has_items_.pop_back();
  is_object_.pop_back();
  out_ += ']';
}

void JsonWriter::key(std::string_view name) {
  if (has_items_.empty() || !is_object_.back()) {
    throw Error(ErrorCode::Internal, "JSON key outside an object");
  }
  prepare_slot();
  out_ += '"';
  out_ += name;  // keys are plain identifiers
  out_ += "\": ";
  pending_key_ = true;
}

void JsonWriter::value(double number) {
  prepare_slot();
  out_ += format_number(number);
}

void JsonWriter::value(std::int64_t number) {
  prepare_slot();
  out_ += std::to_string(number);
}

void JsonWriter::value(std::uint64_t number) {
  prepare_slot();
  out_ += std::to_string(number);
}

void JsonWriter::value(bool flag) {
  prepare_slot();
  out_ += flag ? "true" : "false";
}

void JsonWriter::value(std::string_view text) {
  prepare_slot();
  out_ += '"';
  for (char c : text) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\r': out_ += "\\r"; break;
      case '\t': out_ += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          out_ += buffer;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

void JsonWriter::null() {
  prepare_slot();
  out_ += "null";
}

void JsonWriter::value(const Vector& numbers) {
  begin_array();
  for (Eigen::Index i = 0; i < numbers.size(); ++i) value(numbers(i));
  end_array();
}

void JsonWriter::value(const Matrix& numbers) {
  begin_array();
  for (Eigen::Index r = 0; r < numbers.rows(); ++r) {
    begin_array();
    for (Eigen::Index c = 0; c < numbers.cols(); ++c) value(numbers(r, c));
    end_array();
  }
  end_array();
}

std::string JsonWriter::str() const { return out_ + "\n"; }

}  // namespace rsm
