#include "carpetdim/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "carpetdim/errors.hpp"

namespace carpetdim {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Csv::Csv(std::vector<std::string> header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

Csv& Csv::cell(const std::string& s) {
  if (row_open_) text_ += ',';
  row_open_ = true;
  if (s.find_first_of(",\"\n") == std::string::npos) {
    text_ += s;
  } else {
    text_ += '"';
    for (char c : s) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

Csv& Csv::cell(double x) { return cell(format_double(x)); }
Csv& Csv::cell(long long x) { return cell(std::to_string(x)); }
Csv& Csv::cell(unsigned long long x) { return cell(std::to_string(x)); }

void Csv::end_row() {
  text_ += '\n';
  row_open_ = false;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::ConfigParse, "cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::ConfigParse, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) fail(ErrorKind::ConfigParse, "cannot rename " + tmp + ": " + ec.message());
}

std::string sha256_hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace carpetdim
