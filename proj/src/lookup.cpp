#include "completeness/lookup.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace completeness {

namespace {

std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void require_seven_flips(const FeatureVector& x) {
  if (x.size() != 7)
    throw Error(ErrorCode::Generic,
                "projection requires a 7-flip history, got arity " +
                    std::to_string(x.size()));
  for (std::size_t i = 0; i < 7; ++i) {
    double v = real_feature(x, i);
    if (v != 0.0 && v != 1.0)
      throw Error(ErrorCode::Generic,
                  "projection requires binary flip features");
  }
}

}  // namespace

FeatureKey canonical_key(const FeatureVector& x) {
  // Field separator '|' is escaped inside string features so distinct
  // vectors never share a key; numbers and strings get distinct tags.
  std::string key;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) key += '|';
    if (std::holds_alternative<double>(x[i])) {
      key += format_double(std::get<double>(x[i]));
    } else {
      key += 's';
      for (char c : std::get<std::string>(x[i])) {
        if (c == '|' || c == '\\') key += '\\';
        key += c;
      }
    }
  }
  return key;
}

KeyFn identity_key_fn() {
  return [](const FeatureVector& x) { return canonical_key(x); };
}

KeyFn projection_number_of_heads() {
  return [](const FeatureVector& x) {
    require_seven_flips(x);
    int heads = 0;
    for (std::size_t i = 0; i < 7; ++i)
      heads += int(real_feature(x, i));
    return std::to_string(heads);
  };
}

KeyFn projection_flips_4_to_7() {
  return [](const FeatureVector& x) {
    require_seven_flips(x);
    std::string key;
    for (std::size_t i = 3; i < 7; ++i)
      key += real_feature(x, i) == 1.0 ? 'H' : 'T';
    return key;
  };
}

LookupSpec::CellStatistic cell_statistic_for(const LossFunction& loss) {
  return loss.kind == LossFunction::Kind::SquaredError
             ? LookupSpec::CellStatistic::Mean
             : LookupSpec::CellStatistic::Mode;
}

Outcome LookupTable::predict(const FeatureVector& x, const KeyFn& key_fn,
                             std::size_t* unseen_count) const {
  auto it = cells.find(key_fn(x));
  if (it != cells.end()) return it->second.prediction;
  if (unseen_count) ++*unseen_count;
  return fallback(x);
}

std::string LookupTable::serialize() const {
  std::ostringstream out;
  for (const auto& [key, cell] : cells)
    out << key << '\t' << format_double(cell.prediction.value) << '\t'
        << cell.count << '\n';
  return out.str();
}

LookupTable train_lookup(const Dataset& train, const LookupSpec& spec) {
  if (train.empty())
    throw Error(ErrorCode::Generic, "train_lookup: empty training set");

  LookupTable table;
  table.fallback = spec.fallback;

  if (spec.cell_statistic == LookupSpec::CellStatistic::Mean) {
    struct Acc {
      double sum = 0.0;
      std::size_t count = 0;
      Outcome::Kind kind = Outcome::Kind::Real;
    };
    std::map<FeatureKey, Acc> accs;
    for (const auto& obs : train.observations) {
      auto& acc = accs[spec.key_fn(obs.x)];
      acc.sum += obs.y.value;
      ++acc.count;
      acc.kind = obs.y.kind;
    }
    for (const auto& [key, acc] : accs) {
      double mean = acc.sum / double(acc.count);
      Outcome pred = (acc.kind == Outcome::Kind::Binary ||
                      acc.kind == Outcome::Kind::Probability)
                         ? Outcome::probability(mean)
                         : Outcome::real(mean);
      table.cells[key] = {pred, acc.count};
    }
  } else {
    struct Acc {
      std::map<int, std::size_t> counts;
      std::size_t total = 0;
      Outcome::Kind kind = Outcome::Kind::Action;
    };
    std::map<FeatureKey, Acc> accs;
    for (const auto& obs : train.observations) {
      auto& acc = accs[spec.key_fn(obs.x)];
      ++acc.counts[outcome_label(obs.y)];
      ++acc.total;
      acc.kind = obs.y.kind;
    }
    for (const auto& [key, acc] : accs) {
      // Modal label; ties go to the lowest label (std::map iterates in
      // ascending label order and we accept only strict improvements).
      int best_label = acc.counts.begin()->first;
      std::size_t best_count = 0;
      for (const auto& [label, count] : acc.counts) {
        if (count > best_count) {
          best_count = count;
          best_label = label;
        }
      }
      Outcome pred = acc.kind == Outcome::Kind::Action
                         ? Outcome::action(best_label)
                         : Outcome::binary(best_label);
      table.cells[key] = {pred, acc.total};
    }
  }
  return table;
}

double lookup_training_loss(const Dataset& train, const LookupSpec& spec,
                            const LossFunction& loss) {
  LookupTable table = train_lookup(train, spec);
  double total = 0.0;
  for (const auto& obs : train.observations)
    total += loss(table.predict(obs.x, spec.key_fn), obs.y);
  return total / double(train.size());
}

TrainedRule LookupTrainer::train(const Dataset& train,
                                 const LossFunction& loss) const {
  LookupSpec spec = spec_;
  if (cell_statistic_for(loss) != spec.cell_statistic)
    throw Error(ErrorCode::Config,
                "lookup cell statistic does not match the loss function");
  auto table = std::make_shared<LookupTable>(train_lookup(train, spec));
  auto counter = std::make_shared<std::atomic<std::size_t>>(0);
  KeyFn key_fn = spec.key_fn;

  TrainedRule trained;
  trained.rule.name = spec.name;
  trained.rule.predict = [table, key_fn, counter](const FeatureVector& x) {
    auto it = table->cells.find(key_fn(x));
    if (it != table->cells.end()) return it->second.prediction;
    counter->fetch_add(1);
    return table->fallback(x);
  };
  trained.unseen_counter = counter;
  return trained;
}

LookupSpec default_lookup_spec(ProblemKind kind, const LossFunction& loss) {
  LookupSpec spec;
  spec.key_fn = identity_key_fn();
  spec.cell_statistic = cell_statistic_for(loss);
  spec.fallback = naive_rule(kind);
  return spec;
}

}  // namespace completeness
