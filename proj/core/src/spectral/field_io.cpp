#include "caloric/spectral/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "caloric/error.hpp"
#include "caloric/format.hpp"

namespace caloric::spectral {

namespace {

static_assert(std::endian::native == std::endian::little,
              "field dumps are written with native little-endian stores");

template <class T>
void put(std::array<char, 32>& header, std::size_t offset, T value) {
  std::memcpy(header.data() + offset, &value, sizeof(T));
}

template <class T>
T get(const std::array<char, 32>& header, std::size_t offset) {
  T value;
  std::memcpy(&value, header.data() + offset, sizeof(T));
  return value;
}

}  // namespace

void write_field_dump(const std::filesystem::path& path, const VecField& field) {
  std::array<char, 32> header{};
  std::memcpy(header.data(), "CSLF", 4);
  put<std::uint32_t>(header, 4, kFieldDumpVersion);
  put<std::uint32_t>(header, 8, static_cast<std::uint32_t>(field.grid().n()));
  put<std::uint32_t>(header, 12, static_cast<std::uint32_t>(field.components()));
  put<double>(header, 16, field.grid().side_length());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("spectral", "cannot open " + path.string() + " for writing");
  out.write(header.data(), header.size());
  const auto data = field.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw Error("spectral", "write failed for " + path.string());
}

VecField read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("spectral", "cannot open " + path.string());
  std::array<char, 32> header{};
  in.read(header.data(), header.size());
  if (!in || std::memcmp(header.data(), "CSLF", 4) != 0) {
    throw Error("spectral", path.string() + " is not a field dump (bad magic)");
  }
  const auto version = get<std::uint32_t>(header, 4);
  if (version != kFieldDumpVersion) {
    throw Error("spectral", "unsupported field dump version " + std::to_string(version));
  }
  const auto n = static_cast<int>(get<std::uint32_t>(header, 8));
  const auto components = static_cast<int>(get<std::uint32_t>(header, 12));
  const double side = get<double>(header, 16);
  VecField field(Grid2(n, side), components);
  auto data = field.data();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw Error("spectral", path.string() + " is truncated");
  return field;
}

void write_norms_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("spectral", "cannot open " + path.string() + " for writing");
  out << "name,value\n";
  for (const auto& [name, value] : rows) out << name << ',' << format_double(value) << '\n';
}

}  // namespace caloric::spectral
