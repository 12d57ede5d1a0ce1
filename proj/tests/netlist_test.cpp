#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "netscan/netlist.hpp"

using namespace netscan;

TEST_CASE("device taxonomy") {
  CHECK(all_device_kinds().size() == kDeviceLabelCount);
  for (const auto& k : all_device_kinds()) {
    CHECK(parse_device_label(k.annotation) == k.label);
    CHECK(k.ports.size() >= 1);
    CHECK(k.ports.size() <= 4);
  }
  CHECK(device_kind(DeviceLabel::resistor_1).netlist_type == "Resistor");
  CHECK(device_kind(DeviceLabel::resistor_2).netlist_type == "Resistor");
  CHECK(device_kind(DeviceLabel::voltage_lines).netlist_type == "Voltage");
  CHECK(device_kind(DeviceLabel::nmos_bulk).ports.size() == 4);
  CHECK(device_kind(DeviceLabel::dido_amp).ports.size() == 4);
  CHECK(device_kind(DeviceLabel::diso_amp).ports.size() == 3);
  CHECK(device_kind(DeviceLabel::gnd).ports.size() == 1);
  CHECK(device_kind(DeviceLabel::pnp_cross).group == DeviceGroup::BJT);
  CHECK_FALSE(parse_device_label("nfet").has_value());
  CHECK(needs_orientation(DeviceLabel::voltage_lines));
  CHECK_FALSE(needs_orientation(DeviceLabel::voltage));
  CHECK(needs_mirror(DeviceLabel::diso_amp));
  CHECK_FALSE(needs_mirror(DeviceLabel::nmos));
}

TEST_CASE("parse minimal document") {
  const auto n = parse_netlist(
      R"({"devices":[{"id":"R1","type":"resistor_1","ports":{"Pos":"a","Neg":"b"}}]})");
  CHECK(n.devices().size() == 1);
  CHECK(n.nets().size() == 2);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(
      parse_netlist(
          R"({"devices":[{"id":"M1","type":"nmos","ports":{"Gate":"g","Drain":"d"}}]})"),
      doctest::Contains("missing port Source"), NetlistError);
  CHECK_THROWS_AS(parse_netlist("{\"devices\":["), NetlistError);
  CHECK_THROWS_WITH_AS(
      parse_netlist(R"({"devices":[{"id":"X","type":"nfet","ports":{}}]})"),
      doctest::Contains("unknown device type"), NetlistError);
  CHECK_THROWS_WITH_AS(parse_netlist(R"({"devices":[
      {"id":"R1","type":"resistor_1","ports":{"Pos":"a","Neg":"b"}},
      {"id":"R1","type":"resistor_1","ports":{"Pos":"a","Neg":"b"}}]})"),
                       doctest::Contains("duplicate"), NetlistError);
  CHECK_THROWS_AS(
      parse_netlist(R"({"devices":[{"id":"R1","type":"resistor_1","ports":{"Pos":"","Neg":"b"}}]})"),
      NetlistError);
  CHECK_THROWS_AS(parse_netlist(R"({"devices":[{"id":"R1","type":"resistor_1",
      "ports":{"Pos":"a","Neg":"b","Gate":"c"}}]})"),
                  NetlistError);
}

TEST_CASE("ground alias and canonical port order") {
  const auto n = parse_netlist(
      R"({"devices":[{"id":"M1","type":"nmos","ports":{"Source":"0","Gate":"g","Drain":"d"}}]})");
  const Device& m = n.devices().front();
  REQUIRE(m.ports.size() == 3);
  CHECK(m.ports[0].port == "Gate");
  CHECK(m.ports[1].port == "Drain");
  CHECK(m.ports[2].port == "Source");
  CHECK(m.ports[2].net == "GND");
  CHECK(serialize_netlist(n) ==
        R"({"devices":[{"id":"M1","type":"nmos","ports":{"Gate":"g","Drain":"d","Source":"GND"}}]})");
}

TEST_CASE("fig2 circuit") {
  const auto n = testing::fig2_circuit();
  CHECK(n.devices().size() == 6);
  CHECK(n.nets().size() == 4);
  CHECK(n.port_count() == 17);
  CHECK(validate(n).empty());
  const auto again = parse_netlist(serialize_netlist(n));
  CHECK(again == n);
  CHECK(serialize_netlist(n) == serialize_netlist(n));
}

TEST_CASE("serialize empty") { CHECK(serialize_netlist(Netlist{}) == R"({"devices":[]})"); }

TEST_CASE("validate diagnostics") {
  SUBCASE("dangling net") {
    Netlist n({{"R1", DeviceLabel::resistor_1, {{"Pos", "x"}, {"Neg", "GND"}}},
               {"R2", DeviceLabel::resistor_1, {{"Pos", "GND"}, {"Neg", "y"}}},
               {"R3", DeviceLabel::resistor_1, {{"Pos", "y"}, {"Neg", "GND"}}}});
    const auto d = validate(n);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == DiagnosticCode::dangling_net);
    CHECK(d[0].subject == "x");
  }
  SUBCASE("duplicate id") {
    Netlist n({{"M1", DeviceLabel::resistor_1, {{"Pos", "a"}, {"Neg", "b"}}},
               {"M1", DeviceLabel::resistor_1, {{"Pos", "a"}, {"Neg", "b"}}}});
    const auto d = validate(n);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == DiagnosticCode::duplicate_id);
    CHECK(d[0].subject == "M1");
  }
  SUBCASE("intermediate artifacts are flagged, not rejected") {
    const auto n = make_netlist({
        {"M1", DeviceLabel::nmos_cross, {{"Gate", "g"}, {"Drain", "d"}, {"Source", "s"}, {"Conn", "g"}}},
        {"G1", DeviceLabel::gnd, {{"Pin", "s"}}},
        {"R1", DeviceLabel::resistor_1, {{"Pos", "d"}, {"Neg", "s"}}},
    });
    const auto d = validate(n);
    REQUIRE(d.size() == 2);
    CHECK(d[0].code == DiagnosticCode::conn_port);
    CHECK(d[1].code == DiagnosticCode::gnd_device);
  }
  SUBCASE("missing port") {
    Netlist n({{"M1", DeviceLabel::nmos, {{"Gate", "a"}, {"Drain", "a"}}}});
    const auto d = validate(n);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == DiagnosticCode::port_mismatch);
  }
}

TEST_CASE("Conn only accepted on cross kinds") {
  CHECK_THROWS_AS(make_netlist({{"M1", DeviceLabel::nmos,
                                 {{"Gate", "g"}, {"Drain", "d"}, {"Source", "s"}, {"Conn", "g"}}}}),
                  NetlistError);
  CHECK_THROWS_AS(make_netlist({{"M1", DeviceLabel::nmos_cross,
                                 {{"Gate", "g"}, {"Drain", "d"}, {"Source", "s"}, {"Conn", "g"}}}},
                               /*allow_conn=*/false),
                  NetlistError);
}

TEST_CASE("parse inverts serialize on random netlists") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto n = testing::random_netlist(rng, 1 + i % 30);
    CHECK(validate(n).empty());
    const std::string text = serialize_netlist(n);
    const auto back = parse_netlist(text);
    REQUIRE(back == n);
    CHECK(serialize_netlist(back) == text);
  }
}
