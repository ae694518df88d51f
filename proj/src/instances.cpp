#include "symloc/instances.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace symloc {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string label(const char* prefix, int i) { return prefix + std::to_string(i + 1); }

void emit_labels(std::ostringstream& os, const char* prefix, int n) {
  for (int i = 0; i < n; ++i) {
    if (i) os << ", ";
    os << label(prefix, i);
  }
}

// Asymmetric distance matrix with zero diagonal and pairwise-distinct odd
// off-diagonal values. Symmetric matrices would make some swaps genuinely
// objective-invariant (reversing a 4-city tour preserves its length), so the
// generators stay clear of them.
std::vector<std::vector<long long>> distance_matrix(int n, std::uint64_t seed) {
  int arcs = n * (n - 1);
  std::vector<long long> weights(arcs);
  for (int i = 0; i < arcs; ++i) weights[i] = 2 * i + 1;
  std::mt19937_64 rng(mix(seed, 0xd157a));
  std::shuffle(weights.begin(), weights.end(), rng);
  std::vector<std::vector<long long>> d(n, std::vector<long long>(n, 0));
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) d[i][j] = weights[k++];
  return d;
}

void emit_distance_table(std::ostringstream& os, const char* prefix,
                         const std::vector<std::vector<long long>>& d) {
  int n = static_cast<int>(d.size());
  os << "  Distance = {";
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      os << (first ? "\n    " : ",\n    ");
      first = false;
      os << "(" << label(prefix, i) << "," << label(prefix, j) << ") -> " << d[i][j];
    }
  os << "\n  };\n";
}

// Undirected adjacency with the main diagonal unused.
using Adjacency = std::vector<std::vector<char>>;

Adjacency random_graph(int n, double density, std::mt19937_64& rng) {
  Adjacency adj(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool edge = (rng() % 1000) < static_cast<std::uint64_t>(density * 1000);
      adj[i][j] = adj[j][i] = edge;
    }
  return adj;
}

bool twin_pair(const Adjacency& adj, int a, int b) {
  int n = static_cast<int>(adj.size());
  for (int k = 0; k < n; ++k) {
    int ka = k == a ? b : (k == b ? a : k);
    if (adj[a][k] != adj[b][ka]) return false;
    if (adj[k][a] != adj[ka][b]) return false;
  }
  return true;
}

bool has_twin(const Adjacency& adj, int skip_a = -1, int skip_b = -1) {
  int n = static_cast<int>(adj.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (a == skip_a && b == skip_b) continue;
      if (twin_pair(adj, a, b)) return true;
    }
  return false;
}

std::string tsp_model(const InstanceSpec& spec) {
  require(spec.n >= 2, "tsp needs at least 2 cities");
  auto d = distance_matrix(spec.n, spec.seed);
  std::ostringstream os;
  os << "mop tsp" << spec.n << " {\n";
  os << "  type City = { ";
  emit_labels(os, "c", spec.n);
  os << " };\n";
  os << "  type Index = 0 .. " << spec.n - 1 << ";\n";
  os << "  func Distance(City, City) -> int;\n";
  os << "  func Next(Index) -> Index;\n";
  os << "  var func Map(Index) -> City;\n";
  os << "  constraint forall x in Index: forall y in Index: x != y => Map(x) != Map(y);\n";
  os << "  minimize sum { Distance(Map(z), Map(Next(z))) | z in Index };\n";
  emit_distance_table(os, "c", d);
  os << "  Next = {";
  for (int i = 0; i < spec.n; ++i)
    os << (i ? ", " : " ") << "(" << i << ") -> " << (i + 1) % spec.n;
  os << " };\n";
  os << "}\n";
  return os.str();
}

std::string tsp_alt_model(const InstanceSpec& spec) {
  require(spec.n >= 2, "tsp-alt needs at least 2 cities");
  auto d = distance_matrix(spec.n, spec.seed);
  std::ostringstream os;
  os << "mop tsp_alt" << spec.n << " {\n";
  os << "  type City = { ";
  emit_labels(os, "c", spec.n);
  os << " };\n";
  os << "  func Distance(City, City) -> int;\n";
  os << "  var pred Following(City, City);\n";
  os << "  constraint forall x in City: exists1 y in City: Following(x, y);\n";
  os << "  constraint forall y in City: exists1 x in City: Following(x, y);\n";
  os << "  constraint forall x in City: reachable(x, Following, City);\n";
  os << "  minimize sum { Distance(x, y) | x in City, y in City, Following(x, y) };\n";
  emit_distance_table(os, "c", d);
  os << "}\n";
  return os.str();
}

std::string shortest_path_model(const InstanceSpec& spec) {
  require(spec.n >= 3, "shortest-path needs at least 3 cities");
  auto d = distance_matrix(spec.n, spec.seed);
  std::ostringstream os;
  os << "mop shortest_path" << spec.n << " {\n";
  os << "  type City = { ";
  emit_labels(os, "c", spec.n);
  os << " };\n";
  os << "  type Goal = { " << label("c", spec.n - 1) << " };\n";
  os << "  func Distance(City, City) -> int;\n";
  os << "  const Start() -> City;\n";
  os << "  const End() -> City;\n";
  os << "  var pred Following(City, City);\n";
  os << "  constraint exists1 y in City: Following(Start, y);\n";
  os << "  constraint forall x in City: !Following(x, Start);\n";
  os << "  constraint forall x in City: !Following(End, x);\n";
  os << "  constraint exists1 x in City: Following(x, End);\n";
  os << "  constraint forall x in City: (x != Start & x != End) => "
        "((exists y in City: Following(x, y)) <=> (exists y in City: Following(y, x)));\n";
  os << "  constraint forall x in City: forall y in City: forall z in City: "
        "(Following(x, y) & Following(x, z)) => y = z;\n";
  os << "  constraint forall x in City: forall y in City: forall z in City: "
        "(Following(y, x) & Following(z, x)) => y = z;\n";
  os << "  constraint reachable(Start, Following, Goal);\n";
  os << "  minimize sum { Distance(x, y) | x in City, y in City, Following(x, y) };\n";
  emit_distance_table(os, "c", d);
  os << "  Start = { () -> c1 };\n";
  os << "  End = { () -> " << label("c", spec.n - 1) << " };\n";
  os << "}\n";
  return os.str();
}

std::string max_clique_model(const InstanceSpec& spec) {
  require(spec.n >= 3, "max-clique needs at least 3 nodes");
  Adjacency adj;
  for (std::uint64_t attempt = 0;; ++attempt) {
    require(attempt < 1000, "max-clique generator failed to build a usable graph");
    std::mt19937_64 rng(mix(spec.seed, mix(0xc11c, attempt)));
    adj = random_graph(spec.n, spec.edge_density, rng);
    if (spec.symmetric_graph) {
      // Plant exactly one interchangeable (twin) pair: n1 and n2 share all
      // neighbours and are not adjacent.
      adj[0][1] = adj[1][0] = 0;
      for (int k = 2; k < spec.n; ++k) adj[1][k] = adj[k][1] = adj[0][k];
      if (twin_pair(adj, 0, 1) && !has_twin(adj, 0, 1)) break;
    } else {
      if (!has_twin(adj)) break;
    }
  }
  std::ostringstream os;
  os << "mop max_clique" << spec.n << " {\n";
  os << "  type Node = { ";
  emit_labels(os, "n", spec.n);
  os << " };\n";
  os << "  pred Edge(Node, Node);\n";
  os << "  var pred InClique(Node);\n";
  os << "  constraint forall x in Node: forall y in Node: "
        "(InClique(x) & InClique(y) & x != y) => Edge(x, y);\n";
  os << "  maximize count { x in Node | InClique(x) };\n";
  os << "  Edge = {";
  bool first = true;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      if (i != j && adj[i][j]) {
        os << (first ? " " : ", ");
        first = false;
        os << "(" << label("n", i) << "," << label("n", j) << ")";
      }
  os << (first ? "};\n" : " };\n");
  os << "}\n";
  return os.str();
}

// Directed edges; colorability is ensured with a greedy check so every
// generated instance is satisfiable.
std::string cnp_model(const InstanceSpec& spec) {
  require(spec.n >= 2, "cnp needs at least 2 nodes");
  require(spec.colors >= 2, "cnp needs at least 2 colors");
  std::vector<std::pair<int, int>> edges;
  for (std::uint64_t attempt = 0;; ++attempt) {
    require(attempt < 1000, "cnp generator failed to build a usable graph");
    std::mt19937_64 rng(mix(spec.seed, mix(0xc0109, attempt)));
    edges.clear();
    Adjacency adj(spec.n, std::vector<char>(spec.n, 0));
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) {
        if (i == j) continue;
        if ((rng() % 1000) < static_cast<std::uint64_t>(spec.edge_density * 500)) {
          adj[i][j] = 1;
          edges.emplace_back(i, j);
        }
      }
    // Greedy colorability over the undirected closure.
    std::vector<int> color(spec.n, -1);
    bool colorable = true;
    for (int v = 0; v < spec.n && colorable; ++v) {
      std::vector<char> used(spec.colors, 0);
      for (int u = 0; u < spec.n; ++u)
        if ((adj[v][u] || adj[u][v]) && color[u] >= 0) used[color[u]] = 1;
      color[v] = -1;
      for (int c = 0; c < spec.colors; ++c)
        if (!used[c]) {
          color[v] = c;
          break;
        }
      if (color[v] < 0) colorable = false;
    }
    if (!colorable) continue;
    // No interchangeable nodes: every node swap must move the edge set.
    bool twin = false;
    for (int a = 0; a < spec.n && !twin; ++a)
      for (int b = a + 1; b < spec.n && !twin; ++b) {
        bool same = true;
        for (int i = 0; i < spec.n && same; ++i)
          for (int j = 0; j < spec.n && same; ++j) {
            int pi = i == a ? b : (i == b ? a : i);
            int pj = j == a ? b : (j == b ? a : j);
            if (adj[i][j] != adj[pi][pj]) same = false;
          }
        twin = same;
      }
    if (!twin && !edges.empty()) break;
  }
  std::ostringstream os;
  os << "mop cnp" << spec.n << "x" << spec.colors << " {\n";
  os << "  type Node = { ";
  emit_labels(os, "n", spec.n);
  os << " };\n";
  os << "  type Color = { ";
  emit_labels(os, "col", spec.colors);
  os << " };\n";
  os << "  pred Edge(Node, Node);\n";
  os << "  var func Coloring(Node) -> Color;\n";
  os << "  constraint forall x in Node: forall y in Node: Edge(x, y) => "
        "Coloring(x) != Coloring(y);\n";
  os << "  minimize count { z in Color | exists x in Node: Coloring(x) = z };\n";
  os << "  Edge = {";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    os << (k ? ", " : " ");
    os << "(" << label("n", edges[k].first) << "," << label("n", edges[k].second) << ")";
  }
  os << (edges.empty() ? "};\n" : " };\n");
  os << "}\n";
  return os.str();
}

struct KnapsackData {
  std::vector<long long> volume;
  std::vector<long long> value;
  long long capacity = 0;
};

KnapsackData knapsack_data(const InstanceSpec& spec) {
  int m = spec.n;
  int forced = 2 * (spec.equal_volume_pairs + spec.twin_pairs);
  require(m >= 1, "knapsack needs at least 1 object");
  require(forced <= m, "knapsack pair parameters exceed the object count");

  std::mt19937_64 rng(mix(spec.seed, 0x6ac5));
  // One volume per group: forced pairs share theirs, everything else is
  // unique, so exactly the forced pairs are swappable.
  int groups = spec.equal_volume_pairs + spec.twin_pairs + (m - forced);
  std::vector<long long> pool(3 * m);
  std::iota(pool.begin(), pool.end(), 1);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<long long> group_volume(pool.begin(), pool.begin() + groups);

  std::vector<long long> value_pool(6 * m);
  std::iota(value_pool.begin(), value_pool.end(), 1);
  std::shuffle(value_pool.begin(), value_pool.end(), rng);

  KnapsackData data;
  data.volume.resize(m);
  data.value.resize(m);
  int g = 0, vp = 0, obj = 0;
  for (int p = 0; p < spec.equal_volume_pairs; ++p, ++g) {
    data.volume[obj] = data.volume[obj + 1] = group_volume[g];
    data.value[obj] = value_pool[vp++];
    data.value[obj + 1] = value_pool[vp++];
    obj += 2;
  }
  for (int p = 0; p < spec.twin_pairs; ++p, ++g) {
    data.volume[obj] = data.volume[obj + 1] = group_volume[g];
    data.value[obj] = data.value[obj + 1] = value_pool[vp++];
    obj += 2;
  }
  for (; obj < m; ++obj, ++g) {
    data.volume[obj] = group_volume[g];
    data.value[obj] = value_pool[vp++];
  }
  long long total = std::accumulate(data.volume.begin(), data.volume.end(), 0LL);
  data.capacity = (total + 1) / 2;
  return data;
}

std::string knapsack_model(const InstanceSpec& spec) {
  KnapsackData data = knapsack_data(spec);
  int m = spec.n;
  std::ostringstream os;
  os << "mop knapsack" << m << " {\n";
  os << "  type Object = { ";
  emit_labels(os, "o", m);
  os << " };\n";
  os << "  func Volume(Object) -> int;\n";
  os << "  func Value(Object) -> int;\n";
  os << "  const Capacity() -> int;\n";
  os << "  var pred In(Object);\n";
  os << "  constraint sum { Volume(o) | o in Object, In(o) } <= Capacity;\n";
  os << "  maximize sum { Value(o) | o in Object, In(o) };\n";
  os << "  Volume = {";
  for (int i = 0; i < m; ++i)
    os << (i ? ", " : " ") << "(" << label("o", i) << ") -> " << data.volume[i];
  os << " };\n";
  os << "  Value = {";
  for (int i = 0; i < m; ++i)
    os << (i ? ", " : " ") << "(" << label("o", i) << ") -> " << data.value[i];
  os << " };\n";
  os << "  Capacity = { () -> " << data.capacity << " };\n";
  os << "}\n";
  return os.str();
}

std::string assignment_model(const InstanceSpec& spec) {
  require(spec.n >= 2, "assignment needs at least 2 agents");
  int n = spec.n;
  std::vector<std::vector<long long>> cost(n, std::vector<long long>(n));
  for (std::uint64_t attempt = 0;; ++attempt) {
    require(attempt < 1000, "assignment generator failed to build generic costs");
    std::mt19937_64 rng(mix(spec.seed, mix(0xa551, attempt)));
    std::vector<long long> pool(8 * n * n);
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost[i][j] = pool[k++];
    // Generic costs: no two rows and no two columns differ by a constant,
    // otherwise the corresponding swap would be objective-invariant.
    bool degenerate = false;
    for (int a = 0; a < n && !degenerate; ++a)
      for (int b = a + 1; b < n && !degenerate; ++b) {
        bool row_const = true, col_const = true;
        for (int j = 1; j < n; ++j) {
          if (cost[a][j] - cost[b][j] != cost[a][0] - cost[b][0]) row_const = false;
          if (cost[j][a] - cost[j][b] != cost[0][a] - cost[0][b]) col_const = false;
        }
        degenerate = row_const || col_const;
      }
    if (!degenerate) break;
  }
  std::ostringstream os;
  os << "mop assignment" << n << " {\n";
  os << "  type Agent = { ";
  emit_labels(os, "a", n);
  os << " };\n";
  os << "  type Task = { ";
  emit_labels(os, "t", n);
  os << " };\n";
  os << "  func Cost(Agent, Task) -> int;\n";
  os << "  var func Assign(Agent) -> Task;\n";
  os << "  constraint forall x in Agent: forall y in Agent: x != y => "
        "Assign(x) != Assign(y);\n";
  os << "  minimize sum { Cost(x, Assign(x)) | x in Agent };\n";
  os << "  Cost = {";
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      os << (first ? " " : ", ");
      first = false;
      os << "(" << label("a", i) << "," << label("t", j) << ") -> " << cost[i][j];
    }
  os << " };\n";
  os << "}\n";
  return os.str();
}

int pairs_of(int n) { return n * (n - 1) / 2; }

}  // namespace

std::optional<Problem> problem_from_name(const std::string& name) {
  if (name == "tsp") return Problem::Tsp;
  if (name == "tsp-alt") return Problem::TspAlt;
  if (name == "shortest-path") return Problem::ShortestPath;
  if (name == "max-clique") return Problem::MaxClique;
  if (name == "cnp") return Problem::Cnp;
  if (name == "knapsack") return Problem::Knapsack;
  if (name == "assignment") return Problem::Assign;
  return std::nullopt;
}

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::Tsp: return "tsp";
    case Problem::TspAlt: return "tsp-alt";
    case Problem::ShortestPath: return "shortest-path";
    case Problem::MaxClique: return "max-clique";
    case Problem::Cnp: return "cnp";
    case Problem::Knapsack: return "knapsack";
    case Problem::Assign: return "assignment";
  }
  return "unknown";
}

std::string generate(const InstanceSpec& spec) {
  switch (spec.problem) {
    case Problem::Tsp: return tsp_model(spec);
    case Problem::TspAlt: return tsp_alt_model(spec);
    case Problem::ShortestPath: return shortest_path_model(spec);
    case Problem::MaxClique: return max_clique_model(spec);
    case Problem::Cnp: return cnp_model(spec);
    case Problem::Knapsack: return knapsack_model(spec);
    case Problem::Assign: return assignment_model(spec);
  }
  throw std::invalid_argument("unknown problem");
}

int Expectation::candidates() const {
  int total = 0;
  for (const auto& f : families)
    total += f.variant + f.invariant + f.rejected_structural;
  return total;
}

int Expectation::surviving() const {
  int total = 0;
  for (const auto& f : families) total += f.variant;
  return total;
}

nlohmann::ordered_json Expectation::to_json() const {
  nlohmann::ordered_json out;
  out["families"] = nlohmann::ordered_json::array();
  for (const auto& f : families) {
    nlohmann::ordered_json fam;
    fam["type"] = f.type_name;
    fam["variant"] = f.variant;
    fam["invariant"] = f.invariant;
    fam["rejected_structural"] = f.rejected_structural;
    out["families"].push_back(std::move(fam));
  }
  out["candidates"] = candidates();
  out["surviving"] = surviving();
  return out;
}

Expectation expected_detection(const InstanceSpec& spec) {
  Expectation e;
  switch (spec.problem) {
    case Problem::Tsp:
      e.families.push_back({"City", pairs_of(spec.n), 0, 0});
      e.families.push_back({"Index", pairs_of(spec.n), 0, 0});
      break;
    case Problem::TspAlt:
      e.families.push_back({"City", pairs_of(spec.n), 0, 0});
      break;
    case Problem::ShortestPath: {
      int intermediates = pairs_of(spec.n - 2);
      e.families.push_back({"City", intermediates, 0, pairs_of(spec.n) - intermediates});
      break;
    }
    case Problem::MaxClique:
      if (spec.symmetric_graph)
        e.families.push_back({"Node", 0, 1, pairs_of(spec.n) - 1});
      else
        e.families.push_back({"Node", 0, 0, pairs_of(spec.n)});
      break;
    case Problem::Cnp:
      e.families.push_back({"Node", 0, 0, pairs_of(spec.n)});
      e.families.push_back({"Color", 0, pairs_of(spec.colors), 0});
      break;
    case Problem::Knapsack: {
      int other = pairs_of(spec.n) - spec.equal_volume_pairs - spec.twin_pairs;
      e.families.push_back(
          {"Object", spec.equal_volume_pairs, spec.twin_pairs, other});
      break;
    }
    case Problem::Assign:
      e.families.push_back({"Agent", pairs_of(spec.n), 0, 0});
      e.families.push_back({"Task", pairs_of(spec.n), 0, 0});
      break;
  }
  return e;
}

}  // namespace symloc
