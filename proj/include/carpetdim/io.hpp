#pragma once

// CSV formatting, atomic file writes and content hashes.

#include <string>
#include <vector>

namespace carpetdim {

// 17 significant digits, '.' decimal point.
std::string format_double(double x);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& cell(const std::string& s);
  Csv& cell(double x);
  Csv& cell(long long x);
  Csv& cell(unsigned long long x);
  Csv& cell(int x) { return cell(static_cast<long long>(x)); }
  Csv& cell(unsigned x) { return cell(static_cast<unsigned long long>(x)); }
  Csv& cell(long x) { return cell(static_cast<long long>(x)); }
  Csv& cell(unsigned long x) { return cell(static_cast<unsigned long long>(x)); }
  void end_row();
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  bool row_open_ = false;
};

// Writes path.tmp then renames over path. Errors: ConfigParse on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string sha256_hex(const std::string& content);

}  // namespace carpetdim
