#include "mdepth/io.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/format.hpp"

#include <istream>
#include <iterator>
#include <sstream>

namespace mdepth {

using nlohmann::json;

namespace {

std::string at(std::size_t index) { return "object " + std::to_string(index) + ": "; }

std::vector<double> numbers(const json& j, const char* key, std::size_t index) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw InvalidArgument(at(index) + "missing array \"" + key + "\"");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw InvalidArgument(at(index) + "\"" + key + "\" holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::VectorXd vector_of(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json values_array(const std::vector<double>& v) { return json(v); }

json timing_value(double seconds, bool timing) { return timing ? json(seconds) : json(nullptr); }

std::string cell(double x) { return format_double(x); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Object object_from_json(const json& j, std::size_t index) {
  if (!j.is_object()) throw InvalidArgument(at(index) + "expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw InvalidArgument(at(index) + "missing string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "corr") {
      if (!j.contains("rows") || !j["rows"].is_array()) {
        throw InvalidArgument("missing array \"rows\"");
      }
      const auto& rows = j["rows"];
      const std::size_t p = rows.size();
      if (j.contains("p") && (!j["p"].is_number_integer() || j["p"].get<std::int64_t>() != static_cast<std::int64_t>(p))) {
        throw InvalidArgument("\"p\" does not match the number of rows");
      }
      if (p == 0) throw InvalidArgument("empty correlation matrix");
      Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
      for (std::size_t r = 0; r < p; ++r) {
        if (!rows[r].is_array() || rows[r].size() != p) throw InvalidArgument("rows must form a square matrix");
        for (std::size_t c = 0; c < p; ++c) {
          if (!rows[r][c].is_number()) throw InvalidArgument("matrix entry is not a number");
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
        }
      }
      return CorrelationMatrix(std::move(m));
    }
    if (kind == "sphere") return UnitVector::normalized(vector_of(numbers(j, "coords", index)));
    if (kind == "eucl") return EuclideanPoint(vector_of(numbers(j, "coords", index)));
    if (kind == "hist") {
      return Histogram::normalized(numbers(j, "edges", index), numbers(j, "masses", index));
    }
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    if (msg.rfind("object ", 0) == 0) throw;
    throw InvalidArgument(at(index) + msg);
  } catch (const NumericError& e) {
    throw NotPositiveDefinite(at(index) + e.what());
  }
  throw InvalidArgument(at(index) + "unknown kind \"" + kind + "\" (expected corr|sphere|hist|eucl)");
}

json object_to_json(const Object& obj) {
  return std::visit(
      [](const auto& o) -> json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CorrelationMatrix>) {
          json rows = json::array();
          const auto& m = o.entries();
          for (Eigen::Index r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
          }
          return {{"kind", "corr"}, {"p", o.dim()}, {"rows", std::move(rows)}};
        } else if constexpr (std::is_same_v<T, Histogram>) {
          return {{"kind", "hist"}, {"edges", o.edges()}, {"masses", o.masses()}};
        } else {
          const auto& c = o.coords();
          return {{"kind", std::is_same_v<T, UnitVector> ? "sphere" : "eucl"},
                  {"coords", std::vector<double>(c.data(), c.data() + c.size())}};
        }
      },
      obj);
}

Dataset parse_dataset_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw InvalidArgument("dataset must be a JSON array of objects");
  if (j.empty()) throw InvalidArgument("dataset is empty");
  std::vector<Object> objects;
  Dataset data;
  for (std::size_t i = 0; i < j.size(); ++i) {
    objects.push_back(object_from_json(j[i], i));
    if (j[i].contains("label")) {
      if (!j[i]["label"].is_string()) throw InvalidArgument(at(i) + "\"label\" must be a string");
      data.labels.push_back(j[i]["label"].get<std::string>());
    } else {
      data.labels.emplace_back();
    }
  }
  data.objects = ObjectSet(std::move(objects));
  return data;
}

Dataset read_dataset_json(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_dataset_json(text);
}

std::string dataset_to_json(const Dataset& data) {
  json out = json::array();
  for (std::size_t i = 0; i < data.objects.size(); ++i) {
    json o = object_to_json(data.objects[i]);
    if (i < data.labels.size() && !data.labels[i].empty()) o["label"] = data.labels[i];
    out.push_back(std::move(o));
  }
  return out.dump() + "\n";
}

Dataset read_histogram_csv(std::istream& in) {
  Dataset data;
  std::vector<Object> objects;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 4 || fields.size() % 2 != 0) {
      throw InvalidArgument(at(row) + "expected label, then edge,mass pairs and a final edge");
    }
    std::vector<double> edges;
    std::vector<double> masses;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const double v = parse_double(fields[k], "histogram CSV field");
      ((k % 2 == 1) ? edges : masses).push_back(v);
    }
    try {
      objects.push_back(Histogram::normalized(std::move(edges), std::move(masses)));
    } catch (const Error& e) {
      throw InvalidArgument(at(row) + e.what());
    }
    data.labels.push_back(trim(fields[0]));
    ++row;
  }
  if (objects.empty()) throw InvalidArgument("histogram CSV has no rows");
  data.objects = ObjectSet(std::move(objects));
  return data;
}

json to_json(const DepthReport& report, bool timing) {
  return {{"method", to_string(report.method)},
          {"values", values_array(report.values)},
          {"elapsed_seconds", timing_value(report.elapsed_seconds, timing)}};
}

json to_json(const InSampleDeepest& result, const Object& object, DepthMethod method) {
  return {{"source", "in-sample"},
          {"method", to_string(method)},
          {"index", result.index},
          {"depth", result.depth},
          {"object", object_to_json(object)}};
}

json to_json(const DeepestResult& result, DepthMethod method, OptimizerKind optimizer) {
  return {{"source", "out-of-sample"},
          {"method", to_string(method)},
          {"optimizer", to_string(optimizer)},
          {"depth", result.depth},
          {"start_index", result.start_index},
          {"start_depth", result.start_depth},
          {"evaluations", result.evaluations},
          {"pca_dimension", result.pca_dimension},
          {"object", object_to_json(result.object)}};
}

json to_json(const ExperimentReport& report, bool timing) {
  json columns = json::array();
  for (const auto& c : report.columns) {
    json col = {{"name", c.name()},
                {"estimator", to_string(c.estimator)},
                {"method", c.method ? json(to_string(*c.method)) : json(nullptr)},
                {"mean_error", c.mean_error},
                {"sd_error", c.sd_error},
                {"mean_seconds", timing_value(c.mean_seconds, timing)},
                {"errors", values_array(c.errors)}};
    if (timing) col["seconds"] = values_array(c.seconds);
    if (c.estimator == Estimator::OutOfSample) {
      col["depths"] = values_array(c.depths);
      col["start_depths"] = values_array(c.start_depths);
    }
    columns.push_back(std::move(col));
  }
  return {{"space", report.spec.space == SimSpace::Correlation ? "corr" : "sphere"},
          {"reps", replicate_count(report.spec)},
          {"columns", std::move(columns)}};
}

json to_json(const PermutationReport& report, bool corrected) {
  return {{"method", to_string(report.method)},
          {"B", report.B},
          {"seed", report.seed},
          {"groups", report.groups},
          {"group_sizes", report.group_sizes},
          {"t_observed", report.t_observed},
          {"t_permuted", values_array(report.t_permuted)},
          {"p_value", corrected ? report.p_value_corrected : report.p_value},
          {"p_value_convention", corrected ? "(1+count)/(1+B)" : "count/B"}};
}

json to_json(const SwapExperimentReport& report) {
  json methods = json::array();
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    methods.push_back({{"method", to_string(report.methods[m])},
                       {"mean_p_value", report.mean_p_values[m]},
                       {"p_values", values_array(report.p_values[m])}});
  }
  return {{"k", report.k},
          {"repeats", report.repeats},
          {"B", report.B},
          {"seed", report.seed},
          {"methods", std::move(methods)}};
}

std::string report_document(std::string_view command, const json& config, const json& result) {
  const json doc = {{"schema", kReportSchema},
                    {"command", command},
                    {"config", config},
                    {"result", result}};
  return doc.dump(2) + "\n";
}

json parse_report_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    throw InvalidArgument("report has no schema version");
  }
  const std::string schema = doc["schema"].get<std::string>();
  if (schema != kReportSchema) {
    throw InvalidArgument("unsupported report schema '" + schema + "' (expected " +
                          std::string(kReportSchema) + ")");
  }
  if (!doc.contains("result")) throw InvalidArgument("report has no result");
  return doc;
}

DepthReport parse_depth_report(std::string_view text) {
  const json doc = parse_report_document(text);
  const json& r = doc["result"];
  try {
    DepthReport report;
    report.method = parse_method(r.at("method").get<std::string>());
    report.values = r.at("values").get<std::vector<double>>();
    const json& t = r.at("elapsed_seconds");
    report.elapsed_seconds = t.is_null() ? 0.0 : t.get<double>();
    return report;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed depth report: ") + e.what());
  }
}

std::string depth_report_csv(const DepthReport& report, bool timing) {
  std::ostringstream out;
  out << "index,method,depth" << (timing ? ",elapsed_seconds" : "") << "\n";
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    out << i << ',' << to_string(report.method) << ',' << cell(report.values[i]);
    if (timing) out << ',' << cell(report.elapsed_seconds);
    out << '\n';
  }
  return out.str();
}

std::string experiment_csv(const ExperimentReport& report, bool timing) {
  std::ostringstream out;
  out << "replicate,column,estimator,method,error" << (timing ? ",seconds" : "") << "\n";
  const std::size_t reps = replicate_count(report.spec);
  for (std::size_t r = 0; r < reps; ++r) {
    for (const auto& c : report.columns) {
      out << r << ',' << c.name() << ',' << to_string(c.estimator) << ','
          << (c.method ? to_string(*c.method) : "") << ',' << cell(c.errors[r]);
      if (timing) out << ',' << cell(c.seconds[r]);
      out << '\n';
    }
  }
  return out.str();
}

std::string permutation_csv(const PermutationReport& report, bool corrected) {
  std::ostringstream out;
  out << "permutation,method,t_permuted,t_observed,p_value\n";
  const double p = corrected ? report.p_value_corrected : report.p_value;
  for (std::size_t b = 0; b < report.t_permuted.size(); ++b) {
    out << b << ',' << to_string(report.method) << ',' << cell(report.t_permuted[b]) << ','
        << cell(report.t_observed) << ',' << cell(p) << '\n';
  }
  return out.str();
}

std::string swap_csv(const SwapExperimentReport& report) {
  std::ostringstream out;
  out << "repeat,method,k,p_value\n";
  for (std::size_t r = 0; r < report.repeats; ++r) {
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      out << r << ',' << to_string(report.methods[m]) << ',' << report.k << ','
          << cell(report.p_values[m][r]) << '\n';
    }
  }
  return out.str();
}

}  // namespace mdepth
