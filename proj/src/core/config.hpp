#ifndef PHASEFILTER_CONFIG_HPP
#define PHASEFILTER_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "search.hpp"

namespace pf {

// Flat key-value run configuration with dotted section prefixes. Values in
// the file carry explicit units (ns, MHz, mT, rad); everything is converted
// to SI when the typed config is built. Unknown keys are rejected by name.
class RunConfig {
 public:
  RunConfig();  // Table-defaults register, paper-default run settings

  static RunConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  // Typed views, built from the current key set.
  RegisterConfig register_config() const;
  SearchSpec search_spec() const;
  TimeGrid grid() const;
  FrameKind frame_kind() const;
  std::string gate() const;
  int stride() const;
  std::string output_dir() const;
  double duration_s() const;
  double dt_s() const;

  std::string get(const std::string& key) const;
  const std::vector<std::string>& key_order() const { return order_; }

 private:
  double number(const std::string& key) const;
  void validate() const;  // parses every typed view, failing fast
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace pf

#endif
