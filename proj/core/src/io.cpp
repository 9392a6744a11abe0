#include "memheat/io.hpp"

#include "memheat/config.hpp"
#include "memheat/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace memheat {

namespace {
constexpr const char* kHeader = "t,E,g_circ_grad,grad_sq,dissipation,envelope";
}

void write_csv(std::ostream& os, const EnergyTrace& tr, std::span<const double> envelope) {
  if (!envelope.empty() && envelope.size() != tr.size()) {
    throw Error(ErrorKind::ShapeMismatch, "envelope column does not match the trace");
  }
  os << kHeader << "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_double(tr.t[k]) << ',' << format_double(tr.E[k]) << ','
       << format_double(tr.g_circ[k]) << ',' << format_double(tr.grad_sq[k]) << ','
       << format_double(tr.dissipation[k]) << ','
       << (envelope.empty() ? std::string("nan") : format_double(envelope[k])) << '\n';
  }
}

void emit_csv(const EnergyTrace& trace, const std::string& path, std::span<const double> envelope) {
  std::ostringstream os;
  write_csv(os, trace, envelope);
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

CsvTrace read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error(ErrorKind::ConfigInvalid, "'" + path + "' does not start with the trace header");
  }
  CsvTrace out;
  std::vector<double>* cols[] = {&out.t, &out.E, &out.g_circ, &out.grad_sq, &out.dissipation, &out.envelope};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < 6; ++c) {
      const std::size_t end = c == 5 ? line.size() : line.find(',', pos);
      if (end == std::string::npos) {
        throw Error(ErrorKind::ConfigInvalid, "row " + std::to_string(row) + " has too few fields");
      }
      const std::string field = line.substr(pos, end - pos);
      double v = std::nan("");
      if (field != "nan") {
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
          throw Error(ErrorKind::ConfigInvalid, "row " + std::to_string(row) + ": bad number '" + field + "'");
        }
      }
      cols[c]->push_back(v);
      pos = end + 1;
    }
  }
  return out;
}

}  // namespace memheat
