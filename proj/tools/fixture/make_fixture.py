#!/usr/bin/env python3
"""Writes the bundled desk-scale testbed under data/fixture.

Output is deterministic; rerun after editing the topology tables below and
commit the result together with the regenerated manifest.json.
"""

import argparse
import csv
import json
import random
import re
from collections import Counter
from pathlib import Path

ZONES = ["Enterprise", "DMZ", "Operations", "Control", "Field"]

# name -> (authCapable, encryptionCapable)
PROTOCOLS = {
    "ModbusTCP": (False, False),
    "OPC_DA": (False, False),
    "HTTP": (True, False),
    "SMBv1": (True, False),
    "PROFINET": (False, False),
    "S7comm": (False, False),
    "OPC_UA": (True, True),
    "S7commPlus": (True, True),
    "CIP": (True, True),
    "MQTT": (True, False),
    "HTTPS": (True, True),
    "SQL": (True, True),
    "RDP": (True, True),
    "SSH": (True, True),
    "SMB": (True, True),
    "SMTP": (True, True),
    "LDAP": (True, True),
}

# name, vendor, model, assetClass, zone (protocols come from the dataflows)
PRODUCTS = [
    ("corp-ws-01", "Dell", "OptiPlex 7090", "Workstation", "Enterprise"),
    ("corp-ws-02", "Dell", "OptiPlex 7090", "Workstation", "Enterprise"),
    ("corp-ws-03", "HP", "EliteDesk 800", "Workstation", "Enterprise"),
    ("email-gw", "Barracuda", "Email Security Gateway", "Email Gateway", "Enterprise"),
    ("erp-db", "Oracle", "Database Server", "Database", "Enterprise"),
    ("ad-server", "Microsoft", "Windows Server 2019", "Service", "Enterprise"),
    ("file-server", "Microsoft", "Windows Server 2016", "Service", "Enterprise"),
    ("corp-web", "Apache", "HTTP Server", "Service", "Enterprise"),
    ("reverse-proxy", "F5", "BIG-IP", "Reverse Proxy", "DMZ"),
    ("jump-server", "Microsoft", "Remote Desktop Gateway", "Jump Server", "DMZ"),
    ("update-mirror-01", "Microsoft", "WSUS", "Update Mirror", "DMZ"),
    ("update-mirror-02", "Siemens", "SIMATIC Update Server", "Update Mirror", "DMZ"),
    ("historian-dmz", "AVEVA", "PI Server", "Historian", "DMZ"),
    ("mqtt-broker", "Eclipse", "Mosquitto", "MQTT Broker", "DMZ"),
    ("dmz-db", "Microsoft", "SQL Server", "Database", "DMZ"),
    ("scada-01", "Siemens", "WinCC", "SCADA", "Operations"),
    ("scada-02", "Schneider Electric", "EcoStruxure Geo SCADA", "SCADA", "Operations"),
    ("eng-ws-01", "Siemens", "TIA Portal", "Engineering Workstation", "Operations"),
    ("eng-ws-02", "Rockwell Automation", "Studio 5000", "Engineering Workstation", "Operations"),
    ("historian-ops", "AVEVA", "Historian", "Historian", "Operations"),
    ("mes-db", "Microsoft", "SQL Server", "Database", "Operations"),
    ("quality-station-01", "Keyence", "CV-X", "Quality Station", "Operations"),
    ("quality-station-02", "Cognex", "In-Sight", "Quality Station", "Operations"),
    ("ops-service", "Ignition", "Gateway", "Service", "Operations"),
    ("hmi-ops", "Siemens", "SIMATIC HMI", "HMI", "Operations"),
    ("plc-01", "Siemens", "S7-1500", "PLC", "Control"),
    ("plc-02", "Siemens", "S7-1200", "PLC", "Control"),
    ("plc-03", "Schneider Electric", "Modicon M580", "PLC", "Control"),
    ("plc-04", "Schneider Electric", "Modicon M340", "PLC", "Control"),
    ("plc-05", "Rockwell Automation", "ControlLogix", "PLC", "Control"),
    ("plc-06", "Rockwell Automation", "CompactLogix", "PLC", "Control"),
    ("safety-plc-01", "Siemens", "S7-1500F", "Safety PLC", "Control"),
    ("safety-plc-02", "Pilz", "PSS 4000", "Safety PLC", "Control"),
    ("hmi-01", "Siemens", "SIMATIC HMI", "HMI", "Control"),
    ("hmi-02", "Schneider Electric", "Harmony HMI", "HMI", "Control"),
    ("hmi-03", "Rockwell Automation", "PanelView Plus", "HMI", "Control"),
    ("hmi-04", "Beckhoff", "CP6600", "HMI", "Control"),
    ("rtu-01", "ABB", "RTU560", "RTU", "Control"),
    ("iiot-gw", "Moxa", "MGate 5105", "Gateway", "Control"),
    ("edge-gw", "Siemens", "SCALANCE", "Gateway", "Control"),
    ("sensor-01", "Endress+Hauser", "Promag", "Sensor", "Field"),
    ("sensor-02", "Endress+Hauser", "Liquiphant", "Sensor", "Field"),
    ("sensor-03", "Siemens", "SITRANS P", "Sensor", "Field"),
    ("sensor-04", "Siemens", "SITRANS F", "Sensor", "Field"),
    ("sensor-05", "IFM", "O3D", "Sensor", "Field"),
    ("sensor-06", "SICK", "DT50", "Sensor", "Field"),
    ("sensor-07", "Banner", "Q4X", "Sensor", "Field"),
    ("sensor-08", "Turck", "BL20", "Sensor", "Field"),
    ("rogue-sensor", "Generic", "Modbus Sensor", "Sensor", "Field"),
    ("actuator-01", "Festo", "CMMT", "Actuator", "Field"),
    ("actuator-02", "Festo", "VTEM", "Actuator", "Field"),
    ("actuator-03", "SMC", "EX600", "Actuator", "Field"),
    ("actuator-04", "Bosch Rexroth", "IndraDrive", "Actuator", "Field"),
    ("actuator-05", "ABB", "ACS880", "Actuator", "Field"),
    ("robot-01", "KUKA", "KR C5", "Robot", "Field"),
    ("robot-02", "ABB", "IRC5", "Robot", "Field"),
    ("robot-03", "FANUC", "R-30iB", "Robot", "Field"),
    ("robot-04", "Universal Robots", "UR10e", "Robot", "Field"),
    ("drive-01", "Danfoss", "VLT", "Actuator", "Field"),
    ("io-block-01", "WAGO", "750 Series", "Sensor", "Field"),
]

DATAFLOWS = [
    # Enterprise
    ("corp-ws-01", "ad-server", "LDAP"), ("corp-ws-02", "ad-server", "LDAP"), ("file-server", "ad-server", "SMB"),
    ("email-gw", "ad-server", "LDAP"), ("corp-web", "ad-server", "LDAP"), ("corp-ws-03", "file-server", "SMBv1"),
    ("corp-web", "erp-db", "SQL"),
    # Enterprise <-> DMZ
    ("corp-ws-01", "jump-server", "RDP"), ("email-gw", "reverse-proxy", "HTTPS"),
    # DMZ
    ("reverse-proxy", "dmz-db", "SQL"), ("jump-server", "update-mirror-01", "HTTPS"),
    ("historian-dmz", "mqtt-broker", "MQTT"), ("update-mirror-01", "update-mirror-02", "HTTP"),
    # DMZ <-> Operations / Control
    ("jump-server", "eng-ws-01", "RDP"), ("historian-ops", "historian-dmz", "OPC_UA"),
    ("update-mirror-02", "eng-ws-02", "HTTP"), ("mqtt-broker", "iiot-gw", "MQTT"),
    # Operations
    ("eng-ws-01", "scada-01", "OPC_UA"), ("hmi-ops", "scada-01", "OPC_UA"), ("scada-01", "historian-ops", "OPC_UA"),
    ("scada-02", "scada-01", "OPC_UA"), ("historian-ops", "mes-db", "SQL"),
    ("quality-station-01", "mes-db", "SQL"), ("ops-service", "mes-db", "SQL"),
    # Operations <-> Control
    ("scada-01", "plc-01", "S7commPlus"), ("scada-01", "plc-03", "OPC_UA"), ("scada-01", "hmi-01", "OPC_UA"),
    ("scada-01", "plc-05", "CIP"), ("scada-01", "edge-gw", "OPC_UA"),
    ("quality-station-02", "hmi-04", "OPC_UA"),
    # Control
    ("plc-01", "plc-02", "S7commPlus"), ("hmi-02", "plc-03", "ModbusTCP"),
    ("hmi-03", "plc-05", "CIP"), ("plc-05", "plc-06", "CIP"),
    ("plc-01", "safety-plc-01", "PROFINET"), ("edge-gw", "safety-plc-02", "OPC_UA"),
    ("rtu-01", "plc-04", "ModbusTCP"), ("iiot-gw", "rtu-01", "ModbusTCP"), ("hmi-04", "edge-gw", "OPC_UA"),
    # Control <-> Field
    ("plc-01", "sensor-03", "PROFINET"), ("plc-01", "actuator-01", "PROFINET"), ("plc-02", "sensor-04", "PROFINET"),
    ("plc-02", "actuator-02", "PROFINET"), ("plc-03", "sensor-01", "ModbusTCP"), ("plc-03", "actuator-03", "ModbusTCP"),
    ("plc-04", "sensor-02", "OPC_UA"), ("plc-04", "drive-01", "OPC_UA"), ("plc-05", "robot-04", "CIP"),
    ("plc-05", "sensor-06", "CIP"), ("plc-06", "sensor-07", "CIP"), ("plc-06", "actuator-05", "CIP"),
    ("safety-plc-01", "robot-01", "PROFINET"), ("safety-plc-01", "robot-02", "OPC_UA"),
    ("safety-plc-01", "sensor-05", "OPC_UA"), ("safety-plc-02", "robot-03", "OPC_UA"),
    ("safety-plc-02", "actuator-04", "OPC_UA"), ("safety-plc-02", "sensor-08", "OPC_UA"),
    ("rtu-01", "io-block-01", "ModbusTCP"), ("rogue-sensor", "plc-03", "ModbusTCP"),
]

# Cross-zone conduits kept open under segmentation.
ALLOWLIST = [
    ("corp-ws-01", "jump-server"), ("email-gw", "reverse-proxy"), ("corp-ws-03", "update-mirror-01"),
    ("jump-server", "eng-ws-01"), ("historian-ops", "historian-dmz"), ("mqtt-broker", "iiot-gw"),
    ("update-mirror-02", "eng-ws-02"), ("scada-01", "plc-01"), ("scada-02", "plc-03"), ("eng-ws-02", "plc-05"),
] + [(s, d) for s, d, _ in DATAFLOWS if s.startswith(("plc", "safety-plc", "rtu")) and
     d.startswith(("sensor", "actuator", "robot", "drive", "io-block"))] + [("rogue-sensor", "plc-03")]

# Per-model vulnerability exposure: (count, epss range, cvss range, attack vector)
EXPOSURE = {
    "PLC": (3, (0.55, 0.92), (7.5, 9.8), "Network"),
    "Safety PLC": (2, (0.35, 0.70), (7.0, 9.1), "Network"),
    "HMI": (2, (0.25, 0.60), (6.1, 8.8), "Network"),
    "SCADA": (3, (0.45, 0.85), (7.2, 9.8), "Network"),
    "Engineering Workstation": (2, (0.30, 0.65), (6.5, 8.8), "Local"),
    "Historian": (2, (0.20, 0.55), (6.5, 8.6), "Network"),
    "Database": (2, (0.30, 0.70), (6.5, 9.8), "Network"),
    "Quality Station": (1, (0.10, 0.40), (5.3, 7.5), "Adjacent"),
    "Service": (2, (0.20, 0.60), (5.3, 8.8), "Network"),
    "Reverse Proxy": (2, (0.50, 0.90), (7.5, 9.8), "Network"),
    "Jump Server": (2, (0.40, 0.80), (7.5, 9.8), "Network"),
    "Update Mirror": (1, (0.20, 0.50), (6.5, 8.1), "Network"),
    "MQTT Broker": (2, (0.40, 0.85), (7.5, 9.1), "Network"),
    "Email Gateway": (2, (0.50, 0.95), (8.1, 9.8), "Network"),
    "Workstation": (1, (0.10, 0.40), (5.5, 7.8), "Local"),
    "Gateway": (2, (0.40, 0.80), (7.0, 9.8), "Network"),
    "RTU": (2, (0.30, 0.60), (6.5, 8.6), "Network"),
    "Sensor": (1, (0.05, 0.30), (4.3, 7.5), "Adjacent"),
    "Actuator": (1, (0.05, 0.35), (4.3, 7.5), "Adjacent"),
    "Robot": (2, (0.20, 0.55), (6.5, 8.8), "Network"),
}

CWES = [
    ("CWE-20", "Improper Input Validation"), ("CWE-78", "OS Command Injection"),
    ("CWE-79", "Cross-site Scripting"), ("CWE-89", "SQL Injection"),
    ("CWE-119", "Improper Restriction of Operations within the Bounds of a Memory Buffer"),
    ("CWE-287", "Improper Authentication"), ("CWE-306", "Missing Authentication for Critical Function"),
    ("CWE-319", "Cleartext Transmission of Sensitive Information"), ("CWE-352", "Cross-Site Request Forgery"),
    ("CWE-400", "Uncontrolled Resource Consumption"), ("CWE-502", "Deserialization of Untrusted Data"),
    ("CWE-798", "Use of Hard-coded Credentials"),
]
CAPECS = [
    ("CAPEC-66", "SQL Injection", ["CWE-89"]), ("CAPEC-88", "OS Command Injection", ["CWE-78"]),
    ("CAPEC-63", "Cross-Site Scripting", ["CWE-79"]), ("CAPEC-100", "Overflow Buffers", ["CWE-119", "CWE-20"]),
    ("CAPEC-115", "Authentication Bypass", ["CWE-287", "CWE-306"]),
    ("CAPEC-157", "Sniffing Attacks", ["CWE-319"]), ("CAPEC-62", "Cross Site Request Forgery", ["CWE-352"]),
    ("CAPEC-125", "Flooding", ["CWE-400"]), ("CAPEC-586", "Object Injection", ["CWE-502"]),
    ("CAPEC-70", "Try Common or Default Usernames and Passwords", ["CWE-798"]),
]
TECHNIQUES = [
    ("T0866", "Exploitation of Remote Services", ["CAPEC-100", "CAPEC-88", "CAPEC-586"], "TA0108"),
    ("T0819", "Exploit Public-Facing Application", ["CAPEC-66", "CAPEC-63"], "TA0108"),
    ("T0859", "Valid Accounts", ["CAPEC-70", "CAPEC-115"], "TA0109"),
    ("T0842", "Network Sniffing", ["CAPEC-157"], "TA0102"),
    ("T0814", "Denial of Service", ["CAPEC-125"], "TA0105"),
    ("T0855", "Unauthorized Command Message", ["CAPEC-115", "CAPEC-62"], "TA0106"),
    ("T0843", "Program Download", ["CAPEC-586"], "TA0110"),
    ("T0886", "Remote Services", ["CAPEC-70"], "TA0109"),
]
TACTICS = [
    ("TA0108", "Initial Access"), ("TA0109", "Lateral Movement"), ("TA0102", "Discovery"),
    ("TA0105", "Impair Process Control"), ("TA0106", "Impair Process Control"), ("TA0110", "Persistence"),
]
WEAKNESS_BY_CLASS = {
    "PLC": ["CWE-306", "CWE-119", "CWE-798"], "Safety PLC": ["CWE-306", "CWE-20"],
    "HMI": ["CWE-79", "CWE-287"], "SCADA": ["CWE-502", "CWE-119", "CWE-78"],
    "Engineering Workstation": ["CWE-502", "CWE-20"], "Historian": ["CWE-89", "CWE-287"],
    "Database": ["CWE-89", "CWE-287"], "Quality Station": ["CWE-20"], "Service": ["CWE-79", "CWE-352"],
    "Reverse Proxy": ["CWE-20", "CWE-400"], "Jump Server": ["CWE-287", "CWE-798"],
    "Update Mirror": ["CWE-352"], "MQTT Broker": ["CWE-306", "CWE-400"], "Email Gateway": ["CWE-78", "CWE-20"],
    "Workstation": ["CWE-502"], "Gateway": ["CWE-798", "CWE-319"], "RTU": ["CWE-319", "CWE-306"],
    "Sensor": ["CWE-319"], "Actuator": ["CWE-319"], "Robot": ["CWE-306", "CWE-400"],
}

SCENARIOS = [
    ("S1", "MQTT Broker -> PLC", {"ids": ["mqtt-broker"]}, {"assetClass": "PLC"}),
    ("S2", "Quality Station -> HMI", {"assetClass": "Quality Station"}, {"assetClass": "HMI"}),
    ("S3", "Safety PLC -> Robot/Sensor", {"assetClass": "Safety PLC"}, {"assetClass": ["Robot", "Sensor"]}),
    ("S4", "Safety PLC -> Actuator", {"assetClass": "Safety PLC"}, {"assetClass": "Actuator"}),
    ("S5", "Reverse Proxy -> DB", {"assetClass": "Reverse Proxy"}, {"assetClass": "Database"}),
    ("S6", "Email Gateway -> DB", {"assetClass": "Email Gateway"}, {"assetClass": "Database"}),
    ("S7", "Jump Server -> PLC", {"assetClass": "Jump Server"}, {"assetClass": "PLC"}),
    ("S8", "Rogue Sensor Injection", {"ids": ["rogue-sensor"]}, {"assetClass": ["PLC", "Safety PLC"]}),
    ("S9", "Sensor -> Robot/Actuator", {"assetClass": "Sensor", "zone": "Field"}, {"assetClass": ["Robot", "Actuator"]}),
    ("S10", "Update Mirrors -> PLC", {"assetClass": "Update Mirror"}, {"assetClass": "PLC"}),
    ("S11", "Jump Server -> Service", {"assetClass": "Jump Server"}, {"assetClass": "Service"}),
    ("S12", "SCADA -> PLC", {"assetClass": "SCADA"}, {"assetClass": "PLC"}),
    ("S13", "Actuator -> Robot", {"assetClass": "Actuator"}, {"assetClass": "Robot"}),
    ("S14", "Sensor -> Database", {"assetClass": "Sensor"}, {"assetClass": "Database"}),
    ("S15", "Eng. Workstation/SCADA -> Database", {"assetClass": ["Engineering Workstation", "SCADA"]},
     {"assetClass": "Database"}),
]

CRITICALITY = {
    "Safety PLC": 10, "PLC": 9, "RTU": 8, "IED": 8, "Historian": 8, "SCADA": 8, "Robot": 8,
    "HMI": 7, "Gateway": 7, "Database": 7, "Jump Server": 7, "Engineering Workstation": 7,
    "Sensor": 6, "Actuator": 6, "MQTT Broker": 6, "Quality Station": 6,
    "Workstation": 5, "Service": 5, "Update Mirror": 5, "Reverse Proxy": 5, "Email Gateway": 5,
}

CONTROL_PROFILE = {
    "enabled": ["NetworkSegmentation", "PatchManagement", "IDS", "AccessControl", "ConfigHardening"],
    "overrides": {
        "anonFrac": 0.01, "certFrac": 0.93, "accessInsecureModeFrac": 0.002,
        "misconfigRate": 0.008, "hardeningFailCheckFrac": 0.004,
        "patchedInsecureModeFrac": 0.003, "patchedFailCheckFrac": 0.006,
        "failedWriteFrac": 0.02, "auditWriteFrac": 0.005, "clientIpPoolSize": 4,
    },
}


HARDWARE = {"PLC", "Safety PLC", "RTU", "Sensor", "Actuator", "Robot", "Gateway", "HMI"}
IT_DEFAULT = (0.06, 0.08, 0.05, 0.10)
OT_DEFAULT = (0.03, 0.04, 0.03, 0.05)


def token(text):
    """Same folding as the engine's CPE matcher: lower-case alphanumeric runs joined by '_'."""
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


def build(out: Path, seed: int):
    rng = random.Random(seed)
    out.mkdir(parents=True, exist_ok=True)
    models = {}
    for name, vendor, model, cls, zone in PRODUCTS:
        models.setdefault((vendor, model), cls)

    nodes = []  # id, kind, name, zone, criticality, props
    relations = []  # src, dst, kind, props
    advisories = []
    cve_counter = 1000
    cve_cwe = {}
    model_cves = {}
    for (vendor, model), cls in sorted(models.items()):
        count, (elo, ehi), (clo, chi), av = EXPOSURE[cls]
        cves = []
        for i in range(count):
            cve_counter += 7
            cve = f"CVE-2023-{cve_counter}"
            epss = round(rng.uniform(elo, ehi), 4)
            score = round(rng.uniform(clo, chi), 1)
            ac = "High" if rng.random() < 0.25 else "Low"
            props = {
                "status": "ACTIVE",
                "description": f"{vendor} {model}: {rng.choice(['remote code execution', 'authentication bypass', 'denial of service', 'information disclosure'])} in firmware component",
                "epss": epss,
                "kev": epss > 0.8,
                "baseScore": score,
                "accessComplexity": ac,
                "attackVector": av,
                "cpes": [f"cpe:2.3:{'h' if cls in HARDWARE else 'a'}:{token(vendor)}:{token(model)}:*:*:*:*:*:*:*:*"],
                "vendorStatements": [f"Update {model} to the latest firmware."],
            }
            nodes.append((cve, "Vulnerability", cve, "", "", props))
            cves.append(cve)
            cve_cwe[cve] = rng.choice(WEAKNESS_BY_CLASS[cls])
        model_cves[(vendor, model)] = cves
        # Half the models are matched via advisories, the rest through CPE strings only.
        if rng.random() < 0.5:
            advisories.append({"id": f"ICSA-23-{len(advisories) + 100:03d}-01", "vendor": vendor,
                               "product": model, "cves": cves})
    # Withdrawn entries exercise the preprocessing filter.
    for i in range(3):
        cve = f"CVE-2022-{9000 + i}"
        nodes.append((cve, "Vulnerability", cve, "", "", {
            "status": "REJECTED" if i < 2 else "RESOLVED", "description": "withdrawn", "epss": 0.9,
            "baseScore": 9.8, "accessComplexity": "Low", "attackVector": "Network",
            "cpes": ["cpe:2.3:h:siemens:s7_1500:*:*:*:*:*:*:*:*"]}))
        relations.append((cve, "CWE-306", "HAS_CWE", {}))

    for cwe, name in CWES:
        nodes.append((cwe, "Weakness", name, "", "", {}))
    for capec, name, cwes in CAPECS:
        nodes.append((capec, "AttackPattern", name, "", "", {}))
        for cwe in cwes:
            relations.append((cwe, capec, "HAS_CAPEC", {}))
    for tid, name, capecs, tactic in TECHNIQUES:
        nodes.append((tid, "Technique", name, "", "", {}))
        for capec in capecs:
            relations.append((capec, tid, "HAS_TECHNIQUE", {}))
        relations.append((tid, tactic, "SUGGESTED_TACTIC", {}))
    for tid, name in TACTICS:
        nodes.append((tid, "Tactic", name, "", "", {}))
    mitigations = [("M0930", "Network Segmentation"), ("M0932", "Multi-factor Authentication"),
                   ("M0951", "Update Software"), ("M0942", "Disable or Remove Feature or Program")]
    for mid, name in mitigations:
        nodes.append((mid, "Mitigation", name, "", "", {}))
    relations.append(("T0866", "M0951", "MITIGATED_BY", {}))
    relations.append(("T0886", "M0932", "MITIGATED_BY", {}))
    relations.append(("T0855", "M0930", "MITIGATED_BY", {}))
    relations.append(("T0843", "M0942", "MITIGATED_BY", {}))
    for cve, cwe in sorted(cve_cwe.items()):
        relations.append((cve, cwe, "HAS_CWE", {}))

    predictions = []
    for cve in sorted(cve_cwe):
        conf = round(rng.uniform(0.3, 0.95), 3)
        predictions.append((cve, rng.choice(TECHNIQUES)[0], "HAS_POSSIBLE_TECHNIQUE", conf))
        if rng.random() < 0.3:
            alt = rng.choice(CWES)[0]
            if alt != cve_cwe[cve]:
                predictions.append((cve, alt, "HAS_POSSIBLE_CWE", round(rng.uniform(0.3, 0.95), 3)))
    for tid, _, _, _ in TECHNIQUES[:4]:
        predictions.append((tid, "TA0102", "SUGGESTED_TACTIC", round(rng.uniform(0.4, 0.9), 3)))

    with open(out / "node.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "kind", "name", "zone", "criticality", "props_json"])
        for row in nodes:
            w.writerow(list(row[:5]) + [json.dumps(row[5], sort_keys=True) if row[5] else ""])
    with open(out / "relation.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["src", "dst", "kind", "props_json"])
        for s, d, k, p in relations:
            w.writerow([s, d, k, json.dumps(p, sort_keys=True) if p else ""])
    with open(out / "predictions.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["src", "dst", "kind", "confidence"])
        w.writerows(predictions)

    testbed = {
        "name": "purdue-desk-testbed",
        "zones": ZONES,
        "protocols": {p: {"authCapable": a, "encryptionCapable": e} for p, (a, e) in PROTOCOLS.items()},
        "products": [],
        "dataflows": [{"src": s, "dst": d, "protocol": p} for s, d, p in DATAFLOWS],
        "segmentationAllowlist": [list(p) for p in ALLOWLIST],
        "controlProfiles": {"default": CONTROL_PROFILE},
    }
    protocols_of = {}
    for s_, d_, proto in DATAFLOWS:
        protocols_of.setdefault(s_, set()).add(proto)
        protocols_of.setdefault(d_, set()).add(proto)
    for name, vendor, model, cls, zone in PRODUCTS:
        protos = sorted(protocols_of.get(name, ()))
        p = {"name": name, "vendor": vendor, "model": model, "assetClass": cls, "zone": zone, "protocols": protos}
        testbed["products"].append(p)
    (out / "testbed.json").write_text(json.dumps(testbed, indent=2) + "\n")
    (out / "advisories.json").write_text(json.dumps(advisories, indent=2) + "\n")

    scenarios = []
    for sid, name, src, dst in SCENARIOS:
        scenarios.append({"id": sid, "name": name, "source": src, "target": dst, "k": 20, "policy": "Hop"})
    (out / "scenarios.json").write_text(json.dumps({"scenarios": scenarios}, indent=2) + "\n")

    risk = {"convention": "complement", "criticalityDefaults": CRITICALITY, "fallbackCriticality": 5,
            "zoneDefaults": {z: dict(zip("aceh", IT_DEFAULT if z in ("Enterprise", "DMZ") else OT_DEFAULT))
                             for z in ZONES},
            "fallbackZoneDefault": dict(zip("aceh", IT_DEFAULT)),
            "pruneThreshold": 0.05, "minPredictionConfidence": 0.5}
    (out / "risk-config.json").write_text(json.dumps(risk, indent=2) + "\n")
    synth = {"seed": 42, "durationHours": 24, "perFlowSessionRate": 100, "anonFrac": 0.03,
             "insecureModeFrac": 0.005, "certFrac": 0.9, "misconfigRate": 0.02, "failedWriteFrac": 0.05,
             "auditWriteFrac": 0.01, "failCheckFrac": 0.01, "clientIpPoolSize": 10}
    (out / "synth-profile.json").write_text(json.dumps(synth, indent=2) + "\n")
    run = {"nodes": "node.csv", "relations": "relation.csv", "advisories": "advisories.json",
           "testbed": "testbed.json", "predictions": "predictions.csv", "scenarios": "scenarios.json",
           "riskConfig": "risk-config.json", "synthProfile": "synth-profile.json",
           "controlProfile": "default", "seed": 42, "convention": "complement", "output": "out",
           "fastrp": {"dim": 128, "iterationWeights": [0.0, 1.0, 1.0], "includeTaxonomy": True},
           "knnTopK": 5, "interproductTop": 10}
    (out / "run-config.json").write_text(json.dumps(run, indent=2) + "\n")

    # Expected graph, computed from the tables above rather than by the engine.
    node_kinds = Counter(k for _, k, _, _, _, p in nodes if k != "Vulnerability" or p["status"] == "ACTIVE")
    node_kinds["Product"] = len(PRODUCTS)
    node_kinds["Zone"] = len(ZONES)
    node_kinds["Protocol"] = len({p for _, _, p in DATAFLOWS})
    active = {n[0] for n in nodes if n[1] == "Vulnerability" and n[5]["status"] == "ACTIVE"}
    keys = {(s_, d_, k) for s_, d_, k, _ in relations if s_ in active or not s_.startswith("CVE-")}
    keys |= {(s_, d_, k) for s_, d_, k, c in predictions if c >= risk["minPredictionConfidence"]}
    edge_kinds = Counter(k for _, _, k in keys)
    edge_kinds["COMMUNICATES_WITH"] = len({(s_, d_) for s_, d_, _ in DATAFLOWS})
    edge_kinds["IN_ZONE"] = len(PRODUCTS)
    edge_kinds["USES_PROTOCOL"] = sum(len(v) for v in protocols_of.values())
    edge_kinds["HAS_VULNERABILITY"] = sum(len(model_cves[(p[1], p[2])]) for p in PRODUCTS)
    manifest = {"nodes": dict(sorted(node_kinds.items())), "edges": dict(sorted(edge_kinds.items())),
                "products": len(PRODUCTS), "scenarios": len(SCENARIOS), "dataflows": len(DATAFLOWS)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[2] / "data" / "fixture"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    build(Path(args.out), args.seed)


if __name__ == "__main__":
    main()
