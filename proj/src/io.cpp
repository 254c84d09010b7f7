#include "memip/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

namespace memip {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool skippable(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;  // blank
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

[[noreturn]] void fail_parse(const std::string& path, std::size_t lineno,
                             const std::string& what) {
  throw io_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::string format_double(double x, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw io_error(context + ": expected a number, got '" + token + "'");
  }
  return value;
}

long long parse_int(const std::string& token, const std::string& context) {
  long long value = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw io_error(context + ": expected an integer, got '" + token + "'");
  }
  return value;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw io_error("error while writing '" + path + "'");
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) {
    throw io_error("cannot create directory '" + path + "': " + ec.message());
  }
}

Dataset load_events(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);

  Dataset data;
  data.d = -1;
  std::map<std::string, std::size_t> index_of;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    const auto tok = split_ws(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (tok[0] == "d") {
      if (tok.size() != 2) fail_parse(path, lineno, "malformed 'd' line");
      data.d = static_cast<int>(parse_int(tok[1], where));
    } else if (tok[0] == "window") {
      if (tok.size() != 4) fail_parse(path, lineno, "malformed 'window' line");
      if (index_of.count(tok[1])) {
        fail_parse(path, lineno, "duplicate window id '" + tok[1] + "'");
      }
      Realization r;
      r.id = tok[1];
      r.t_minus = parse_double(tok[2], where);
      r.t_plus = parse_double(tok[3], where);
      index_of[r.id] = data.realizations.size();
      data.realizations.push_back(std::move(r));
    } else if (tok[0] == "event") {
      if (tok.size() != 4) fail_parse(path, lineno, "malformed 'event' line");
      auto it = index_of.find(tok[1]);
      if (it == index_of.end()) {
        fail_parse(path, lineno, "event references undeclared window '" + tok[1] + "'");
      }
      Event e;
      e.time = parse_double(tok[2], where);
      e.type = static_cast<int>(parse_int(tok[3], where));
      data.realizations[it->second].events.push_back(e);
    } else {
      fail_parse(path, lineno, "unknown record '" + tok[0] + "'");
    }
  }
  if (data.d < 1) throw io_error(path + ": missing 'd' header line");

  // Normalize the global time origin to the earliest window start.
  double min_start = std::numeric_limits<double>::infinity();
  for (const auto& r : data.realizations) min_start = std::min(min_start, r.t_minus);
  if (!data.realizations.empty() && min_start != 0.0 &&
      std::isfinite(min_start)) {
    for (auto& r : data.realizations) {
      r.t_minus -= min_start;
      r.t_plus -= min_start;
      for (auto& e : r.events) e.time -= min_start;
    }
  }

  try {
    data.validate();
  } catch (const config_error& err) {
    throw io_error(path + ": " + err.what());
  }
  return data;
}

std::string serialize_events(const Dataset& data) {
  std::string out;
  out.reserve(64 + data.total_events() * 32);
  out += "d " + std::to_string(data.d) + "\n";
  for (const auto& r : data.realizations) {
    out += "window " + r.id + " " + format_double(r.t_minus) + " " +
           format_double(r.t_plus) + "\n";
  }
  for (const auto& r : data.realizations) {
    for (const auto& e : r.events) {
      out += "event " + r.id + " " + format_double(e.time) + " " +
             std::to_string(e.type) + "\n";
    }
  }
  return out;
}

void save_events(const Dataset& data, const std::string& path) {
  data.validate();
  write_text_file(path, serialize_events(data));
}

ExpSumModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);

  int d = -1, K = -1;
  double alpha = 0.0;
  std::vector<std::pair<std::array<int, 3>, double>> entries;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    const auto tok = split_ws(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (tok[0] == "d" && tok.size() == 2) {
      d = static_cast<int>(parse_int(tok[1], where));
    } else if (tok[0] == "K" && tok.size() == 2) {
      K = static_cast<int>(parse_int(tok[1], where));
    } else if (tok[0] == "alpha" && tok.size() == 2) {
      alpha = parse_double(tok[1], where);
    } else if (tok[0] == "X" && tok.size() == 5) {
      std::array<int, 3> idx{static_cast<int>(parse_int(tok[1], where)),
                             static_cast<int>(parse_int(tok[2], where)),
                             static_cast<int>(parse_int(tok[3], where))};
      entries.emplace_back(idx, parse_double(tok[4], where));
    } else {
      fail_parse(path, lineno, "unknown or malformed record '" + tok[0] + "'");
    }
  }
  if (d < 1 || K < 1 || !(alpha > 0.0)) {
    throw io_error(path + ": missing or invalid d/K/alpha header");
  }
  ExpSumModel model;
  try {
    model = ExpSumModel(d, K, alpha);
    for (const auto& [idx, value] : entries) {
      const auto [v, u, k] = idx;
      if (v < 1 || v > d || u < 0 || u > d || k < 1 || k > K) {
        throw io_error(path + ": X index (" + std::to_string(v) + "," +
                       std::to_string(u) + "," + std::to_string(k) +
                       ") out of range");
      }
      model.at(v, u, k) = value;
    }
    model.validate();
  } catch (const config_error& err) {
    throw io_error(path + ": " + err.what());
  }
  return model;
}

void save_model(const ExpSumModel& model, const std::string& path) {
  model.validate();
  std::string out;
  out.reserve(64 + model.coef.size() * 40);
  out += "d " + std::to_string(model.d) + "\n";
  out += "K " + std::to_string(model.K) + "\n";
  out += "alpha " + format_double(model.alpha) + "\n";
  for (int v = 1; v <= model.d; ++v) {
    for (int u = 0; u <= model.d; ++u) {
      for (int k = 1; k <= model.K; ++k) {
        out += "X " + std::to_string(v) + " " + std::to_string(u) + " " +
               std::to_string(k) + " " + format_double(model.at(v, u, k)) + "\n";
      }
    }
  }
  write_text_file(path, out);
}

namespace {

Background parse_background(const std::vector<std::string>& tok,
                            const std::string& where) {
  // tok: background v <kind> <params...>
  Background b;
  const std::string& kind = tok[2];
  if (kind == "constant") {
    if (tok.size() != 4) throw io_error(where + ": constant takes one value");
    b.kind = Background::Kind::Constant;
    b.value = parse_double(tok[3], where);
  } else if (kind == "cosdecay") {
    if (tok.size() != 5) throw io_error(where + ": cosdecay takes trig + omega");
    b.kind = Background::Kind::CosineDecay;
    if (tok[3] == "sin") {
      b.sine = true;
    } else if (tok[3] == "cos") {
      b.sine = false;
    } else {
      throw io_error(where + ": cosdecay trig must be 'sin' or 'cos'");
    }
    b.omega = parse_double(tok[4], where);
  } else if (kind == "expsum") {
    if (tok.size() < 5) throw io_error(where + ": expsum takes alpha + coefficients");
    b.kind = Background::Kind::ExpSum;
    b.alpha = parse_double(tok[3], where);
    for (std::size_t i = 4; i < tok.size(); ++i) {
      b.coef.push_back(parse_double(tok[i], where));
    }
  } else {
    throw io_error(where + ": unknown background kind '" + kind + "'");
  }
  return b;
}

Kernel parse_kernel(const std::vector<std::string>& tok, const std::string& where) {
  // tok: kernel v u <kind> <params...>
  Kernel k;
  const std::string& kind = tok[3];
  if (kind == "zero") {
    if (tok.size() != 4) throw io_error(where + ": zero takes no parameters");
    k.kind = Kernel::Kind::Zero;
  } else if (kind == "sinpow") {
    if (tok.size() != 7) throw io_error(where + ": sinpow takes nu omega phase");
    k.kind = Kernel::Kind::SinPowerLaw;
    k.nu = parse_double(tok[4], where);
    k.omega = parse_double(tok[5], where);
    k.phase = parse_double(tok[6], where);
  } else if (kind == "expsum") {
    if (tok.size() < 6) throw io_error(where + ": expsum takes alpha + coefficients");
    k.kind = Kernel::Kind::ExpSum;
    k.alpha = parse_double(tok[4], where);
    for (std::size_t i = 5; i < tok.size(); ++i) {
      k.coef.push_back(parse_double(tok[i], where));
    }
  } else {
    throw io_error(where + ": unknown kernel kind '" + kind + "'");
  }
  return k;
}

std::string background_line(int v, const Background& b) {
  std::string out = "background " + std::to_string(v) + " ";
  switch (b.kind) {
    case Background::Kind::Constant:
      out += "constant " + format_double(b.value);
      break;
    case Background::Kind::CosineDecay:
      out += std::string("cosdecay ") + (b.sine ? "sin" : "cos") + " " +
             format_double(b.omega);
      break;
    case Background::Kind::ExpSum:
      out += "expsum " + format_double(b.alpha);
      for (double c : b.coef) out += " " + format_double(c);
      break;
  }
  return out + "\n";
}

std::string kernel_line(int v, int u, const Kernel& k) {
  std::string out = "kernel " + std::to_string(v) + " " + std::to_string(u) + " ";
  switch (k.kind) {
    case Kernel::Kind::Zero:
      out += "zero";
      break;
    case Kernel::Kind::SinPowerLaw:
      out += "sinpow " + format_double(k.nu) + " " + format_double(k.omega) +
             " " + format_double(k.phase);
      break;
    case Kernel::Kind::ExpSum:
      out += "expsum " + format_double(k.alpha);
      for (double c : k.coef) out += " " + format_double(c);
      break;
  }
  return out + "\n";
}

}  // namespace

GroundTruthModel load_truth(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);

  int d = -1;
  GroundTruthModel truth;
  std::vector<bool> have_background, have_kernel;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    const auto tok = split_ws(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (tok[0] == "d" && tok.size() == 2) {
      d = static_cast<int>(parse_int(tok[1], where));
      if (d < 1) throw io_error(where + ": dimension must be >= 1");
      truth = GroundTruthModel(d);
      have_background.assign(static_cast<std::size_t>(d), false);
      have_kernel.assign(static_cast<std::size_t>(d) * d, false);
    } else if (tok[0] == "background" && tok.size() >= 3) {
      if (d < 1) fail_parse(path, lineno, "'background' before 'd'");
      const int v = static_cast<int>(parse_int(tok[1], where));
      if (v < 1 || v > d) fail_parse(path, lineno, "background index out of range");
      truth.background(v) = parse_background(tok, where);
      have_background[static_cast<std::size_t>(v - 1)] = true;
    } else if (tok[0] == "kernel" && tok.size() >= 4) {
      if (d < 1) fail_parse(path, lineno, "'kernel' before 'd'");
      const int v = static_cast<int>(parse_int(tok[1], where));
      const int u = static_cast<int>(parse_int(tok[2], where));
      if (v < 1 || v > d || u < 1 || u > d) {
        fail_parse(path, lineno, "kernel index out of range");
      }
      truth.kernel(v, u) = parse_kernel(tok, where);
      have_kernel[static_cast<std::size_t>(v - 1) * d + (u - 1)] = true;
    } else {
      fail_parse(path, lineno, "unknown or malformed record '" + tok[0] + "'");
    }
  }
  if (d < 1) throw io_error(path + ": missing 'd' header line");
  for (int v = 1; v <= d; ++v) {
    if (!have_background[static_cast<std::size_t>(v - 1)]) {
      throw io_error(path + ": missing background for type " + std::to_string(v));
    }
  }
  // Unspecified kernels default to zero; that is a valid truth.
  try {
    truth.validate();
  } catch (const config_error& err) {
    throw io_error(path + ": " + err.what());
  }
  return truth;
}

void save_truth(const GroundTruthModel& truth, const std::string& path) {
  truth.validate();
  std::string out;
  out += "d " + std::to_string(truth.d) + "\n";
  for (int v = 1; v <= truth.d; ++v) {
    out += background_line(v, truth.background(v));
  }
  for (int v = 1; v <= truth.d; ++v) {
    for (int u = 1; u <= truth.d; ++u) {
      out += kernel_line(v, u, truth.kernel(v, u));
    }
  }
  write_text_file(path, out);
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::string path;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->path = path;
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) {
    delete impl_;
    throw io_error("cannot open '" + path + "' for writing");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  impl_->out << line;
  if (!impl_->out) throw io_error("error while writing '" + impl_->path + "'");
}

}  // namespace memip
