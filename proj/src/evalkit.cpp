#include "rscm/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rscm/hash.hpp"

namespace rscm {

using nlohmann::json;

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("triple_id").get<std::string>(), j.at("answer").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(Errc::parse_error, e.what(), line_no);
    }
  }
  return out;
}

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, path.string());
  for (const auto& p : preds) out << json{{"triple_id", p.triple_id}, {"answer", p.answer}}.dump() << '\n';
}

std::string normalize_answer(std::string_view answer) {
  std::size_t b = 0;
  std::size_t e = answer.size();
  while (b < e && std::isspace(static_cast<unsigned char>(answer[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(answer[e - 1]))) --e;
  std::string out(answer.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string gold_checksum(const std::vector<Triple>& gold) {
  std::vector<std::string> keys;
  keys.reserve(gold.size());
  for (const auto& t : gold) keys.push_back(t.triple_id + '\t' + std::to_string(t.qid) + '\t' + t.answer);
  std::sort(keys.begin(), keys.end());
  std::string joined;
  for (const auto& k : keys) {
    joined += k;
    joined += '\n';
  }
  return sha256_hex(joined);
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) n += row_sum(r);
  return n;
}

std::size_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::size_t n = 0;
  for (auto v : counts[row]) n += v;
  return n;
}

double round2(double percent) { return std::round(percent * 100.0) / 100.0; }

namespace {

using PredIndex = std::unordered_map<std::string, std::string>;

PredIndex index_predictions(const std::vector<Prediction>& preds) {
  PredIndex index;
  for (const auto& p : preds) {
    if (!index.emplace(p.triple_id, normalize_answer(p.answer)).second) {
      throw Error(Errc::duplicate_triple_id, p.triple_id);
    }
  }
  return index;
}

ConfusionMatrix build_confusion(const std::vector<Triple>& gold, const PredIndex& preds, int qid,
                                const Registry* registry) {
  ConfusionMatrix m;
  const QuestionTemplate* tmpl = registry != nullptr ? registry->find(qid) : nullptr;
  if (tmpl != nullptr) {
    for (const auto& a : tmpl->answer_domain) m.labels.push_back(normalize_answer(a));
  } else {
    std::set<std::string> labels;
    for (const auto& t : gold) {
      if (t.qid == qid) labels.insert(normalize_answer(t.answer));
    }
    m.labels.assign(labels.begin(), labels.end());
  }
  // Gold answers outside a registry domain still get a row.
  for (const auto& t : gold) {
    if (t.qid != qid) continue;
    const std::string g = normalize_answer(t.answer);
    if (std::find(m.labels.begin(), m.labels.end(), g) == m.labels.end()) m.labels.push_back(g);
  }
  const std::size_t n = m.labels.size();
  m.counts.assign(n, std::vector<std::size_t>(n + 1, 0));
  const auto column_of = [&m, n](const std::string& label) {
    const auto it = std::find(m.labels.begin(), m.labels.end(), label);
    return it == m.labels.end() ? n : static_cast<std::size_t>(it - m.labels.begin());
  };
  for (const auto& t : gold) {
    if (t.qid != qid) continue;
    const std::size_t row = column_of(normalize_answer(t.answer));
    const auto it = preds.find(t.triple_id);
    const std::size_t col = it == preds.end() ? n : column_of(it->second);
    ++m.counts[row][col];
  }
  return m;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<Triple>& gold, const std::vector<Prediction>& preds,
                          int qid, const Registry* registry) {
  if (std::none_of(gold.begin(), gold.end(), [qid](const Triple& t) { return t.qid == qid; })) {
    throw Error(Errc::unknown_qid, std::to_string(qid));
  }
  return build_confusion(gold, index_predictions(preds), qid, registry);
}

MetricsReport score(const std::vector<Triple>& gold, const std::vector<Prediction>& preds,
                    const ScorePolicy& policy, const Registry* registry) {
  if (gold.empty()) throw Error(Errc::empty_gold, "no gold triples");
  std::set<std::string> gold_ids;
  for (const auto& t : gold) {
    if (!gold_ids.insert(t.triple_id).second) throw Error(Errc::duplicate_triple_id, "gold " + t.triple_id);
  }
  const PredIndex index = index_predictions(preds);

  MetricsReport report;
  report.gold_checksum = gold_checksum(gold);
  for (const auto& p : preds) {
    if (gold_ids.contains(p.triple_id)) continue;
    if (policy.strict) throw Error(Errc::unknown_triple_id, p.triple_id);
    ++report.unmatched_predictions;
  }

  std::size_t correct = 0;
  for (const auto& t : gold) {
    auto& q = report.per_qid[t.qid];
    ++q.total;
    const auto it = index.find(t.triple_id);
    if (it == index.end()) {
      if (policy.strict) throw Error(Errc::missing_prediction, t.triple_id);
      ++report.missing_predictions;
      continue;
    }
    if (it->second == normalize_answer(t.answer)) {
      ++q.correct;
      ++correct;
    }
  }
  double acc_sum = 0.0;
  for (auto& [qid, q] : report.per_qid) {
    q.accuracy = 100.0 * static_cast<double>(q.correct) / static_cast<double>(q.total);
    acc_sum += q.accuracy;
    report.confusion[qid] = build_confusion(gold, index, qid, registry);
  }
  report.oa = 100.0 * static_cast<double>(correct) / static_cast<double>(gold.size());
  report.aa = acc_sum / static_cast<double>(report.per_qid.size());
  return report;
}

json to_json(const MetricsReport& r) {
  json per_qid = json::object();
  for (const auto& [qid, q] : r.per_qid) {
    per_qid[std::to_string(qid)] = {{"correct", q.correct}, {"total", q.total}, {"accuracy", round2(q.accuracy)}};
  }
  json conf = json::object();
  for (const auto& [qid, m] : r.confusion) {
    std::vector<std::string> columns = m.labels;
    columns.emplace_back(kOtherColumn);
    conf[std::to_string(qid)] = {{"rows", m.labels}, {"columns", columns}, {"counts", m.counts}};
  }
  return {{"oa", round2(r.oa)},
          {"aa", round2(r.aa)},
          {"per_qid", std::move(per_qid)},
          {"confusion", std::move(conf)},
          {"unmatched_predictions", r.unmatched_predictions},
          {"missing_predictions", r.missing_predictions},
          {"gold_checksum", r.gold_checksum}};
}

MetricsReport report_from_json(const json& doc) {
  try {
    MetricsReport r;
    r.oa = doc.at("oa").get<double>();
    r.aa = doc.at("aa").get<double>();
    for (const auto& [key, q] : doc.at("per_qid").items()) {
      r.per_qid[std::stoi(key)] = {q.at("correct").get<std::size_t>(), q.at("total").get<std::size_t>(),
                                   q.at("accuracy").get<double>()};
    }
    for (const auto& [key, m] : doc.at("confusion").items()) {
      ConfusionMatrix cm;
      cm.labels = m.at("rows").get<std::vector<std::string>>();
      cm.counts = m.at("counts").get<std::vector<std::vector<std::size_t>>>();
      r.confusion[std::stoi(key)] = std::move(cm);
    }
    r.unmatched_predictions = doc.at("unmatched_predictions").get<std::size_t>();
    r.missing_predictions = doc.at("missing_predictions").get<std::size_t>();
    r.gold_checksum = doc.at("gold_checksum").get<std::string>();
    return r;
  } catch (const std::exception& e) {
    throw Error(Errc::parse_error, std::string("metrics report: ") + e.what());
  }
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "qid,correct,total,accuracy\n";
  for (const auto& [qid, q] : r.per_qid) {
    out << 'Q' << qid << ',' << q.correct << ',' << q.total << ',' << fixed2(q.accuracy) << '\n';
  }
  out << "OA,,," << fixed2(r.oa) << '\n';
  out << "AA,,," << fixed2(r.aa) << '\n';
  return out.str();
}

std::vector<DeltaRow> compare_reports(const MetricsReport& a, const MetricsReport& b) {
  if (a.gold_checksum != b.gold_checksum) throw Error(Errc::basis_mismatch, "reports scored on different gold sets");
  const auto row = [](std::string key, double va, double vb) {
    DeltaRow d{std::move(key), va, vb, round2(vb) - round2(va), {}};
    const double shown = round2(d.delta);
    if (shown > 0.0) {
      d.marked = "+" + fixed2(shown);
    } else if (shown < 0.0) {
      d.marked = fixed2(shown);
    } else {
      d.marked = "0.00";
    }
    return d;
  };
  std::vector<DeltaRow> rows;
  rows.push_back(row("OA", a.oa, b.oa));
  rows.push_back(row("AA", a.aa, b.aa));
  for (const auto& [qid, qa] : a.per_qid) {
    const auto it = b.per_qid.find(qid);
    if (it == b.per_qid.end()) throw Error(Errc::basis_mismatch, "qid " + std::to_string(qid) + " missing");
    rows.push_back(row("Q" + std::to_string(qid), qa.accuracy, it->second.accuracy));
  }
  return rows;
}

}  // namespace rscm
