#include "covspec/matrix_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace covspec {

namespace {

constexpr char kMagic[16] = {'C', 'O', 'V', 'S', 'P', 'E', 'C', '-',
                             'M', 'A', 'T', '\0', '\0', '\0', '\0', '\0'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw InvalidInput("matrix_io: truncated header length");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_matrix_binary(std::ostream& os, const DataMatrix& m) {
  const bool complex_data = std::holds_alternative<Eigen::MatrixXcd>(m);
  Eigen::Index p, n;
  if (complex_data) {
    p = std::get<Eigen::MatrixXcd>(m).rows();
    n = std::get<Eigen::MatrixXcd>(m).cols();
  } else {
    p = std::get<Eigen::MatrixXd>(m).rows();
    n = std::get<Eigen::MatrixXd>(m).cols();
  }
  nlohmann::json hdr = {{"p", p},
                        {"n", n},
                        {"dtype", complex_data ? "c128" : "f64"},
                        {"layout", "column-major"}};
  const std::string htext = hdr.dump();

  os.write(kMagic, sizeof(kMagic));
  write_u32(os, static_cast<std::uint32_t>(htext.size()));
  os.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  // Eigen default storage is column-major; dump raw doubles little-endian
  // (this code targets little-endian hosts)
  if (complex_data) {
    const auto& mat = std::get<Eigen::MatrixXcd>(m);
    os.write(reinterpret_cast<const char*>(mat.data()),
             static_cast<std::streamsize>(sizeof(double) * 2 * p * n));
  } else {
    const auto& mat = std::get<Eigen::MatrixXd>(m);
    os.write(reinterpret_cast<const char*>(mat.data()),
             static_cast<std::streamsize>(sizeof(double) * p * n));
  }
  if (!os) throw Error("matrix_io: write failed");
}

DataMatrix read_matrix_binary(std::istream& is) {
  char magic[16];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InvalidInput("matrix_io: bad magic");
  const std::uint32_t hlen = read_u32(is);
  std::string htext(hlen, '\0');
  is.read(htext.data(), hlen);
  if (!is) throw InvalidInput("matrix_io: truncated JSON header");
  nlohmann::json hdr = nlohmann::json::parse(htext);
  const Eigen::Index p = hdr.at("p").get<Eigen::Index>();
  const Eigen::Index n = hdr.at("n").get<Eigen::Index>();
  const std::string dtype = hdr.at("dtype").get<std::string>();
  if (hdr.at("layout").get<std::string>() != "column-major")
    throw InvalidInput("matrix_io: unsupported layout");
  if (p <= 0 || n <= 0) throw InvalidInput("matrix_io: bad dimensions");

  if (dtype == "f64") {
    Eigen::MatrixXd mat(p, n);
    is.read(reinterpret_cast<char*>(mat.data()),
            static_cast<std::streamsize>(sizeof(double) * p * n));
    if (!is) throw InvalidInput("matrix_io: payload shorter than declared p*n");
    is.peek();
    if (!is.eof()) throw InvalidInput("matrix_io: payload longer than declared p*n");
    return mat;
  }
  if (dtype == "c128") {
    Eigen::MatrixXcd mat(p, n);
    is.read(reinterpret_cast<char*>(mat.data()),
            static_cast<std::streamsize>(sizeof(double) * 2 * p * n));
    if (!is) throw InvalidInput("matrix_io: payload shorter than declared p*n");
    is.peek();
    if (!is.eof()) throw InvalidInput("matrix_io: payload longer than declared p*n");
    return mat;
  }
  throw InvalidInput("matrix_io: unknown dtype " + dtype);
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  std::ostringstream line;
  line.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.str("");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) line << ",";
      line << m(i, j);
    }
    os << line.str() << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos == 0) numeric = false;
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {  // optional header row
        first = false;
        continue;
      }
      throw InvalidInput("matrix_io: non-numeric CSV cell");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("matrix_io: ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("matrix_io: empty CSV");
  Eigen::MatrixXd mat(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return mat;
}

DataMatrix load_matrix(const std::string& path) {
  const bool is_csv =
      path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (is_csv) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("load_matrix: cannot open " + path);
    return read_matrix_csv(f);
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("load_matrix: cannot open " + path);
  return read_matrix_binary(f);
}

void save_matrix(const std::string& path, const DataMatrix& m) {
  const bool is_csv =
      path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (is_csv) {
    if (!std::holds_alternative<Eigen::MatrixXd>(m))
      throw InvalidInput("save_matrix: complex data needs the binary format");
    std::ofstream f(path);
    if (!f) throw Error("save_matrix: cannot open " + path);
    write_matrix_csv(f, std::get<Eigen::MatrixXd>(m));
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("save_matrix: cannot open " + path);
  write_matrix_binary(f, m);
}

}  // namespace covspec
