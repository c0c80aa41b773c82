#pragma once

// Mock data generation, attribute resolution and user-data replacement.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "recast/dsl.hpp"
#include "recast/layout.hpp"

namespace recast {

using Seed = std::uint64_t;

/// One visual mark's worth of data.
struct MockDatum {
  int group_index = 0;
  int item_index = 0;
  double value = 0;
  /// Flexible-position input per dimension, indexed by index_of(Dimension).
  std::array<double, 4> channels{};
  /// Resolved non-layout attributes.
  std::map<StyleKey, AttributeValue> styles;
  /// node_link endpoints: "<container>[k]" or a bare container id.
  std::optional<std::string> source;
  std::optional<std::string> target;

  friend bool operator==(const MockDatum&, const MockDatum&) = default;
};

struct MockTable {
  std::vector<std::vector<MockDatum>> groups;

  std::size_t row_count() const;
  std::vector<int> shape() const;
  ElementGrid element_grid() const;

  friend bool operator==(const MockTable&, const MockTable&) = default;
};

/// Per-container generator: splitmix64(seed ^ fnv1a(container id)).
Seed derive_seed(Seed seed, const ContainerId& id);

/// Uniform double in [0,1) from the top 53 bits of one draw.
double unit_draw(std::mt19937_64& rng);

/// Values are uniform in [0.2, 1.0]; channels uniform in [0, 1]. Node-link
/// endpoints are left empty (see generate_link_assignments).
MockTable generate_table(const DataSpecification& spec, Seed seed, const ContainerId& id = ContainerId::root());

AttributeValue resolve_attribute(const NonLayoutAttribute& attr, int group_index, int item_index, double value,
                                 std::mt19937_64& rng);

/// Color helpers: "#RRGGBB" <-> components.
std::array<int, 3> parse_color(std::string_view hex);
std::string format_color(const std::array<int, 3>& rgb);

struct LinkAssignment {
  std::string source;
  std::string target;
  friend bool operator==(const LinkAssignment&, const LinkAssignment&) = default;
};

/// Reference universe of a node-link container: every addressable mark or
/// instance of the referenced containers.
struct LinkUniverse {
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  /// Set when source and target name the same containers (or one is missing).
  bool single_container = false;
};

/// Mark or instance references of the containers named in `layout`.
LinkUniverse link_universe(const DslDocument& doc, const LayoutSpecification& layout);

std::vector<LinkAssignment> generate_link_assignments(const MarkSpecification& mark, const LinkUniverse& universe,
                                                      Seed seed);

// ------------------------------------------------------------------ user data

using CellValue = std::variant<double, std::string>;

struct UserRow {
  std::map<std::string, CellValue> cells;
};

/// Rows grouped as uploaded: an array of arrays, or rows sharing a `group`
/// column value. Flat uploads without grouping have `grouped == false`.
struct UserTable {
  std::vector<std::vector<UserRow>> groups;
  bool grouped = false;
  std::vector<std::string> columns;  // first-appearance order

  bool has_column(std::string_view name) const;
  std::size_t row_count() const;
};

/// JSON (array of objects, or array of arrays of objects) or CSV with a
/// header row. Throws DataError for malformed input or unknown columns.
UserTable parse_user_table(std::string_view text);

struct UserDataResult {
  DslDocument document;
  MockTable table;
};

/// Applies an uploaded table to one container. Same-shape uploads merge
/// column by column into `base` (or the seeded mock table); other shapes
/// replace the table and update the container's data_structure.
UserDataResult apply_user_data(const DslDocument& doc, const ContainerId& id, const UserTable& upload, Seed seed,
                               const MockTable* base = nullptr);

/// The exemplar users edit and upload back: JSON rows (an array of arrays
/// for 2D structures) with value, flexible-position channels, resolved
/// styles and link endpoints.
std::string table_to_json(const MockTable& table, const DataSpecification& spec);
std::string table_to_csv(const MockTable& table, const DataSpecification& spec);

struct UserOverride {
  ContainerId container;
  UserTable table;
};

/// Every table needed to render one document under a seed and a sequence
/// of user uploads. Node-link endpoints are filled in.
class DataProvider {
 public:
  DataProvider(const DslDocument& doc, Seed seed, const std::vector<UserOverride>& overrides = {});

  /// The document after user uploads adjusted data structures.
  const DslDocument& document() const { return doc_; }
  Seed seed() const { return seed_; }
  const MockTable& table(const ContainerId& id) const;
  bool has_table(const ContainerId& id) const { return tables_.count(id) > 0; }
  const std::map<ContainerId, MockTable>& tables() const { return tables_; }

 private:
  DslDocument doc_;
  Seed seed_;
  std::map<ContainerId, MockTable> tables_;
};

}  // namespace recast
