#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "mode/errors.hpp"
#include "mode/io.hpp"

namespace mode {

namespace {

// Reads one whitespace-delimited header token.
std::string next_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch) && std::isspace(static_cast<unsigned char>(ch))) {
  }
  if (!in) return tok;
  tok.push_back(ch);
  while (in.get(ch) && !std::isspace(static_cast<unsigned char>(ch)))
    tok.push_back(ch);
  return tok;
}

void byteswap_floats(std::vector<float>& data) {
  for (float& f : data) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    u = __builtin_bswap32(u);
    std::memcpy(&f, &u, 4);
  }
}

constexpr bool kHostLittleEndian = std::endian::native == std::endian::little;

}  // namespace

void pfm_write(const FloatMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("pfm_write: cannot open " + path.string());
  out << "Pf\n" << map.width << " " << map.height << "\n-1.0\n";
  // PFM stores the bottom row first.
  std::vector<float> row(map.width);
  for (int r = map.height - 1; r >= 0; --r) {
    std::memcpy(row.data(), &map.data[static_cast<size_t>(r) * map.width],
                static_cast<size_t>(map.width) * 4);
    if constexpr (!kHostLittleEndian) byteswap_floats(row);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()) * 4);
  }
  if (!out) throw DataError("pfm_write: write failed for " + path.string());
}

FloatMap pfm_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("pfm_read: cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic == "PF")
    throw DataError("pfm_read: color PFM not supported: " + path.string());
  if (magic != "Pf")
    throw DataError("pfm_read: bad magic in " + path.string());
  int width = 0, height = 0;
  double scale = 0.0;
  try {
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
    scale = std::stod(next_token(in));
  } catch (const std::exception&) {
    throw DataError("pfm_read: malformed header in " + path.string());
  }
  if (width <= 0 || height <= 0 || scale == 0.0)
    throw DataError("pfm_read: malformed header in " + path.string());

  FloatMap map(width, height);
  std::vector<float> row(width);
  for (int r = height - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()) * 4);
    if (in.gcount() != static_cast<std::streamsize>(row.size()) * 4)
      throw DataError("pfm_read: truncated payload in " + path.string());
    const bool file_little = scale < 0.0;
    if (file_little != kHostLittleEndian) byteswap_floats(row);
    std::memcpy(&map.data[static_cast<size_t>(r) * width], row.data(),
                static_cast<size_t>(width) * 4);
  }
  return map;
}

}  // namespace mode
