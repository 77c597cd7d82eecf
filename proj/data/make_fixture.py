#!/usr/bin/env python3
"""(Re)generates the synthetic demo panel committed as countries.csv / panel.csv.

The data are synthetic: 47 geographical units x 9 quinquennia with the usual
wine-world group structure (12 Old World, 5 Latin + 5 Anglo New World,
25 Rest of World) and magnitudes shaped like the historical record (large
North-African exports early, New World growth from the eighties, rising
Rest-of-World imports). Flows, prices and GDP paths are invented; country
coordinates are representative centroids (main wine region for producers,
capital otherwise). Deterministic: a fixed seed drives all jitter.
"""

import random

PERIODS = ["1961-65", "1966-70", "1971-75", "1976-80", "1981-85",
           "1986-90", "1991-95", "1996-00", "2001-05"]

WORLD_EXPORT_VOL = [2.7e6, 2.9e6, 3.3e6, 3.7e6, 4.1e6, 4.4e6, 5.0e6, 6.0e6, 7.2e6]
IMPORT_OVER_EXPORT = 1.02  # world gross imports vs gross exports

# id: (name, world, lat, lon, avg_temp, christ, muslim, is_north_africa)
COUNTRIES = {
    "FRA": ("France", "OW", 45.7, 4.8, 11.5, 1, 0, 0),
    "ITA": ("Italy", "OW", 43.5, 11.0, 14.5, 1, 0, 0),
    "ESP": ("Spain", "OW", 41.7, -3.7, 13.5, 1, 0, 0),
    "PRT": ("Portugal", "OW", 41.1, -7.8, 15.5, 1, 0, 0),
    "DEU": ("Germany", "OW", 49.9, 8.0, 9.5, 1, 0, 0),
    "AUT": ("Austria", "OW", 48.2, 16.4, 10.0, 1, 0, 0),
    "CHE": ("Switzerland", "OW", 46.5, 6.6, 9.0, 1, 0, 0),
    "BLX": ("Belgium-Luxembourg", "OW", 50.6, 5.5, 10.0, 1, 0, 0),
    "GRC": ("Greece", "OW", 38.0, 23.7, 17.5, 1, 0, 0),
    "BGR": ("Bulgaria", "OW", 42.7, 25.5, 11.0, 1, 0, 0),
    "HUN": ("Hungary", "OW", 48.1, 21.4, 10.5, 1, 0, 0),
    "ROU": ("Romania", "OW", 45.0, 27.0, 10.5, 1, 0, 0),
    "ARG": ("Argentina", "LNW", -34.6, -68.3, 16.0, 1, 0, 0),
    "CHL": ("Chile", "LNW", -33.5, -70.7, 14.0, 1, 0, 0),
    "BRA": ("Brazil", "LNW", -29.2, -51.5, 17.5, 1, 0, 0),
    "MEX": ("Mexico", "LNW", 32.0, -116.6, 17.0, 1, 0, 0),
    "URY": ("Uruguay", "LNW", -34.8, -56.0, 16.5, 1, 0, 0),
    "USA": ("United States", "ANW", 38.5, -122.5, 14.5, 1, 0, 0),
    "AUS": ("Australia", "ANW", -34.5, 138.7, 16.5, 1, 0, 0),
    "NZL": ("New Zealand", "ANW", -41.5, 173.8, 12.5, 1, 0, 0),
    "ZAF": ("South Africa", "ANW", -33.9, 18.9, 16.5, 1, 0, 0),
    "CAN": ("Canada", "ANW", 43.2, -79.4, 8.0, 1, 0, 0),
    "AZE": ("Azerbaijan", "RW", 40.4, 49.9, 13.0, 0, 1, 0),
    "CHN": ("China", "RW", 39.9, 116.4, 12.5, 0, 0, 0),
    "HRV": ("Croatia", "RW", 45.8, 16.0, 11.5, 1, 0, 0),
    "DNK": ("Denmark", "RW", 55.7, 12.6, 8.5, 1, 0, 0),
    "FIN": ("Finland", "RW", 60.2, 24.9, 5.5, 1, 0, 0),
    "GEO": ("Georgia", "RW", 41.7, 44.8, 12.5, 1, 0, 0),
    "IRL": ("Ireland", "RW", 53.3, -6.2, 9.5, 1, 0, 0),
    "JPN": ("Japan", "RW", 35.7, 139.7, 15.5, 0, 0, 0),
    "MDE": ("Middle East", "RW", 33.9, 35.5, 20.0, 0.5, 0.5, 0),
    "MDA": ("Moldova", "RW", 47.0, 28.9, 10.0, 1, 0, 0),
    "NLD": ("Netherlands", "RW", 52.4, 4.9, 10.0, 1, 0, 0),
    "NAF": ("North Africa", "RW", 36.8, 3.1, 18.0, 0, 1, 1),
    "OAF": ("Other Africa", "RW", -1.3, 36.8, 24.0, 0, 0, 0),
    "OAP": ("Other Asia-Pacific", "RW", 28.6, 77.2, 25.0, 0, 0, 0),
    "OCE": ("Other Central and Eastern Europe", "RW", 52.2, 21.0, 8.5, 1, 0, 0),
    "OLC": ("Other Latin American and Caribbean", "RW", 4.7, -74.1, 22.0, 1, 0, 0),
    "ONA": ("Other North and East Asia", "RW", 22.3, 114.2, 23.0, 0, 0, 0),
    "OWE": ("Other West Europe", "RW", 59.9, 10.8, 6.5, 1, 0, 0),
    "RUS": ("Russia", "RW", 55.8, 37.6, 5.5, 1, 0, 0),
    "SEA": ("South-East Asia", "RW", 1.35, 103.8, 27.0, 0, 0, 0),
    "SWE": ("Sweden", "RW", 59.3, 18.1, 7.0, 1, 0, 0),
    "TUR": ("Turkey", "RW", 39.9, 32.9, 12.0, 0, 1, 0),
    "UKR": ("Ukraine", "RW", 50.5, 30.5, 8.5, 1, 0, 0),
    "GBR": ("United Kingdom", "RW", 51.5, -0.1, 10.0, 1, 0, 0),
    "UZB": ("Uzbekistan", "RW", 41.3, 69.2, 13.5, 0, 1, 0),
}


def ramp(start, end):
    return [start + (end - start) * t / 8.0 for t in range(9)]


# Export-volume weights (relative; normalized per period before scaling).
EXPORT_W = {
    "FRA": [0.240, 0.250, 0.245, 0.235, 0.225, 0.205, 0.185, 0.170, 0.160],
    "ITA": [0.170, 0.180, 0.190, 0.195, 0.200, 0.195, 0.190, 0.185, 0.180],
    "ESP": [0.100, 0.105, 0.110, 0.115, 0.120, 0.125, 0.130, 0.140, 0.150],
    "PRT": [0.035, 0.034, 0.033, 0.032, 0.031, 0.030, 0.030, 0.030, 0.030],
    "DEU": [0.012, 0.014, 0.017, 0.020, 0.024, 0.028, 0.032, 0.036, 0.038],
    "AUT": [0.006, 0.006, 0.007, 0.007, 0.008, 0.008, 0.008, 0.008, 0.008],
    "CHE": [0.0012] * 9,
    "BLX": [0.0025, 0.004, 0.006, 0.008, 0.011, 0.014, 0.018, 0.022, 0.026],
    "GRC": [0.009, 0.009, 0.008, 0.008, 0.007, 0.007, 0.006, 0.006, 0.006],
    "BGR": [0.035, 0.037, 0.038, 0.036, 0.032, 0.026, 0.018, 0.012, 0.009],
    "HUN": [0.030, 0.031, 0.031, 0.030, 0.027, 0.022, 0.016, 0.012, 0.010],
    "ROU": [0.012, 0.013, 0.013, 0.012, 0.011, 0.010, 0.008, 0.007, 0.007],
    "USA": [0.0015, 0.0015, 0.002, 0.005, 0.012, 0.022, 0.035, 0.045, 0.055],
    "AUS": [0.0008, 0.0009, 0.001, 0.002, 0.006, 0.018, 0.040, 0.070, 0.100],
    "NZL": [0, 0, 0, 0.0002, 0.0006, 0.0015, 0.004, 0.008, 0.012],
    "ZAF": [0.003, 0.003, 0.003, 0.003, 0.004, 0.005, 0.009, 0.016, 0.025],
    "CAN": [0, 0, 0, 0.0001, 0.0002, 0.0005, 0.001, 0.002, 0.003],
    "ARG": [0.004, 0.004, 0.004, 0.005, 0.005, 0.006, 0.010, 0.018, 0.030],
    "CHL": [0.001, 0.001, 0.0015, 0.002, 0.003, 0.007, 0.018, 0.032, 0.045],
    "BRA": [0, 0, 0.0001, 0.0002, 0.0003, 0.0006, 0.001, 0.0015, 0.002],
    "MEX": [0, 0, 0.0002, 0.0003, 0.0004, 0.0006, 0.0009, 0.0013, 0.002],
    "URY": [0, 0.0001, 0.0001, 0.0002, 0.0003, 0.0005, 0.0008, 0.0012, 0.002],
    "NAF": [0.270, 0.180, 0.095, 0.045, 0.018, 0.008, 0.004, 0.003, 0.002],
    "MDA": [0.012, 0.013, 0.014, 0.014, 0.013, 0.011, 0.009, 0.008, 0.008],
    "GEO": [0.006, 0.006, 0.006, 0.006, 0.005, 0.005, 0.004, 0.003, 0.003],
    "HRV": [0.004, 0.004, 0.004, 0.004, 0.004, 0.003, 0.003, 0.003, 0.003],
    "OCE": [0.008, 0.008, 0.009, 0.009, 0.008, 0.007, 0.007, 0.006, 0.006],
    "RUS": [0.004, 0.004, 0.004, 0.004, 0.004, 0.003, 0.003, 0.003, 0.003],
    "UKR": [0.003, 0.003, 0.003, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004],
    "TUR": [0.002] * 9,
    "AZE": [0.002, 0.002, 0.002, 0.002, 0.002, 0.001, 0.001, 0.001, 0.001],
    "UZB": [0.001] * 9,
    "GBR": [0.0008, 0.001, 0.0012, 0.0015, 0.002, 0.003, 0.004, 0.005, 0.006],
    "NLD": [0.0006, 0.0008, 0.001, 0.0013, 0.0016, 0.002, 0.0027, 0.0033, 0.004],
    "DNK": [0.0002, 0.0003, 0.0004, 0.0006, 0.0008, 0.0011, 0.0014, 0.0017, 0.002],
    "MDE": [0.0008, 0.0008, 0.0007, 0.0007, 0.0006, 0.0006, 0.0008, 0.0009, 0.001],
    "OAF": [0.001, 0.0012, 0.0012, 0.001, 0.0009, 0.0008, 0.0008, 0.0009, 0.001],
    "CHN": [0, 0, 0, 0, 0, 0.0005, 0.001, 0.002, 0.004],
    "JPN": [0, 0, 0, 0, 0, 0, 0.0002, 0.0003, 0.0005],
    "ONA": [0, 0, 0, 0, 0.0002, 0.0004, 0.0007, 0.001, 0.0015],
    "SEA": [0, 0, 0, 0, 0, 0.0002, 0.0004, 0.0007, 0.001],
    "OAP": [0, 0, 0, 0, 0, 0, 0.0002, 0.0003, 0.0005],
    "OLC": [0, 0, 0, 0.0001, 0.0002, 0.0003, 0.0005, 0.0008, 0.001],
    "OWE": [0.0005, 0.0005, 0.0005, 0.0005, 0.0005, 0.0006, 0.0007, 0.0008, 0.001],
    "FIN": [0] * 9,
    "IRL": [0] * 9,
    "SWE": [0] * 9,
}

IMPORT_W = {
    "FRA": [0.330, 0.240, 0.160, 0.110, 0.085, 0.070, 0.062, 0.058, 0.055],
    "DEU": [0.130, 0.140, 0.150, 0.155, 0.158, 0.160, 0.160, 0.160, 0.158],
    "GBR": [0.080, 0.090, 0.100, 0.110, 0.120, 0.130, 0.140, 0.148, 0.155],
    "CHE": [0.050, 0.046, 0.042, 0.038, 0.034, 0.031, 0.029, 0.027, 0.026],
    "BLX": [0.050, 0.048, 0.045, 0.043, 0.040, 0.038, 0.037, 0.036, 0.035],
    "RUS": [0.040, 0.042, 0.045, 0.044, 0.040, 0.038, 0.042, 0.048, 0.055],
    "USA": [0.030, 0.034, 0.040, 0.048, 0.056, 0.062, 0.068, 0.072, 0.075],
    "NLD": [0.025, 0.028, 0.031, 0.034, 0.037, 0.040, 0.042, 0.044, 0.045],
    "OCE": [0.030, 0.031, 0.032, 0.034, 0.036, 0.037, 0.038, 0.039, 0.040],
    "DNK": [0.015, 0.016, 0.017, 0.018, 0.020, 0.021, 0.022, 0.024, 0.025],
    "SWE": [0.012, 0.013, 0.014, 0.016, 0.017, 0.018, 0.020, 0.021, 0.022],
    "CAN": [0.015, 0.016, 0.018, 0.019, 0.021, 0.022, 0.023, 0.024, 0.025],
    "JPN": [0.002, 0.004, 0.007, 0.011, 0.016, 0.022, 0.028, 0.032, 0.035],
    "CHN": [0, 0, 0.0005, 0.001, 0.002, 0.005, 0.010, 0.018, 0.030],
    "IRL": ramp(0.004, 0.012),
    "FIN": ramp(0.006, 0.010),
    "OWE": ramp(0.020, 0.025),
    "ONA": [0.002, 0.003, 0.004, 0.006, 0.008, 0.011, 0.014, 0.017, 0.020],
    "SEA": ramp(0.002, 0.012),
    "OAP": ramp(0.002, 0.010),
    "OLC": ramp(0.008, 0.012),
    "OAF": ramp(0.006, 0.008),
    "MDE": ramp(0.004, 0.006),
    "UKR": ramp(0.006, 0.010),
    "AZE": ramp(0.002, 0.002),
    "UZB": ramp(0.002, 0.002),
    "GEO": ramp(0.002, 0.002),
    "MDA": ramp(0.002, 0.002),
    "HRV": ramp(0.002, 0.003),
    "TUR": ramp(0.002, 0.003),
    "NAF": ramp(0.002, 0.003),
    "ITA": ramp(0.015, 0.020),
    "ESP": ramp(0.008, 0.012),
    "PRT": ramp(0.004, 0.005),
    "AUT": ramp(0.010, 0.012),
    "GRC": ramp(0.003, 0.004),
    "HUN": ramp(0.004, 0.005),
    "BGR": ramp(0.002, 0.003),
    "ROU": ramp(0.003, 0.004),
    "AUS": ramp(0.004, 0.012),
    "NZL": ramp(0.003, 0.005),
    "ZAF": ramp(0.003, 0.005),
    "ARG": ramp(0.003, 0.004),
    "CHL": ramp(0.001, 0.002),
    "BRA": ramp(0.006, 0.012),
    "MEX": ramp(0.004, 0.010),
    "URY": ramp(0.001, 0.002),
}

# Export unit value, constant USD per litre, start -> end of the sample.
EXPORT_PRICE = {
    "FRA": (3.5, 5.5), "ITA": (1.8, 3.2), "ESP": (1.2, 2.2), "PRT": (2.1, 3.1),
    "DEU": (2.5, 3.6), "AUT": (2.3, 3.3), "CHE": (4.0, 5.2), "BLX": (3.0, 4.1),
    "GRC": (1.5, 2.2), "BGR": (0.8, 1.4), "HUN": (1.0, 1.6), "ROU": (0.9, 1.4),
    "USA": (2.2, 3.4), "AUS": (1.9, 3.1), "NZL": (2.6, 4.4), "ZAF": (1.3, 2.1),
    "CAN": (2.0, 3.0), "ARG": (0.9, 1.8), "CHL": (1.1, 2.1), "BRA": (1.0, 1.6),
    "MEX": (1.2, 1.8), "URY": (1.0, 1.6), "NAF": (0.6, 0.9), "MDA": (0.7, 1.1),
    "GEO": (0.9, 1.3), "HRV": (1.1, 1.7), "OCE": (0.9, 1.5), "RUS": (0.8, 1.3),
    "UKR": (0.8, 1.2), "TUR": (0.9, 1.3), "AZE": (0.8, 1.2), "UZB": (0.7, 1.1),
    "GBR": (4.5, 6.5), "NLD": (3.6, 5.2), "DNK": (3.6, 5.1), "MDE": (2.0, 3.0),
    "CHN": (1.2, 2.0), "JPN": (3.0, 4.5),
}
DEFAULT_EXPORT_PRICE = (1.5, 2.2)

IMPORT_PRICE = {
    "FRA": (0.7, 2.5), "GBR": (2.5, 4.0), "JPN": (2.8, 4.2), "CHE": (2.6, 4.0),
    "DNK": (2.4, 3.8), "SWE": (2.4, 3.8), "USA": (2.4, 3.9), "CAN": (2.2, 3.5),
    "NLD": (2.2, 3.4), "IRL": (2.2, 3.5), "FIN": (2.2, 3.5), "OWE": (2.2, 3.5),
}
DEFAULT_IMPORT_PRICE = (1.8, 2.8)

# Constant-currency GDP per capita at 1961-65 and annual growth rate.
GDP = {
    "USA": (14000, 0.021), "CHE": (16000, 0.015), "SWE": (12000, 0.020),
    "DNK": (11000, 0.020), "GBR": (9800, 0.020), "FRA": (9000, 0.024),
    "DEU": (9500, 0.023), "NLD": (9800, 0.022), "BLX": (9600, 0.022),
    "AUT": (8500, 0.025), "FIN": (8600, 0.026), "ITA": (6500, 0.027),
    "IRL": (6000, 0.036), "ESP": (4800, 0.030), "GRC": (4200, 0.028),
    "PRT": (3600, 0.031), "JPN": (5500, 0.038), "AUS": (11000, 0.019),
    "NZL": (9500, 0.015), "CAN": (11500, 0.020), "ZAF": (3800, 0.013),
    "ARG": (5200, 0.010), "CHL": (3600, 0.023), "BRA": (2400, 0.025),
    "MEX": (3200, 0.020), "URY": (4300, 0.012), "RUS": (4500, 0.012),
    "UKR": (3400, 0.010), "GEO": (2800, 0.010), "MDA": (2200, 0.008),
    "AZE": (2500, 0.012), "UZB": (1800, 0.010), "HRV": (3500, 0.015),
    "HUN": (3400, 0.020), "BGR": (2900, 0.016), "ROU": (2500, 0.015),
    "OCE": (2800, 0.018), "OWE": (10500, 0.022), "TUR": (2300, 0.024),
    "MDE": (3200, 0.020), "NAF": (1500, 0.015), "OAF": (700, 0.010),
    "OAP": (600, 0.022), "SEA": (800, 0.032), "CHN": (400, 0.055),
    "ONA": (2200, 0.040), "OLC": (2600, 0.015),
}

EU_ACCESSION = {"FRA": 1968, "DEU": 1968, "ITA": 1968, "BLX": 1968, "NLD": 1968,
                "GBR": 1973, "IRL": 1973, "DNK": 1973, "GRC": 1981, "ESP": 1986,
                "PRT": 1986, "AUT": 1995, "FIN": 1995, "SWE": 1995}
EURO_START = {"FRA": 1999, "DEU": 1999, "ITA": 1999, "BLX": 1999, "NLD": 1999,
              "IRL": 1999, "ESP": 1999, "PRT": 1999, "AUT": 1999, "FIN": 1999,
              "GRC": 2001}


def years_in_window(cid, t, window_lo, window_hi, accession):
    start = 1961 + 5 * t
    if cid not in accession:
        return 0
    joined = accession[cid]
    return sum(1 for y in range(start, start + 5)
               if window_lo <= y <= window_hi and y >= joined)


def main():
    rng = random.Random(42)
    jitter = {}
    for cid in COUNTRIES:
        jitter[cid] = [1.0 + 0.04 * (2.0 * rng.random() - 1.0) for _ in range(9)]

    ids = sorted(COUNTRIES)
    with open("countries.csv", "w") as out:
        out.write("id,name,world,latitude,longitude,avg_temp,christ_ruler,"
                  "muslim_ruler,is_north_africa\n")
        for cid in ids:
            name, world, lat, lon, temp, christ, muslim, na = COUNTRIES[cid]
            out.write(f"{cid},{name},{world},{lat},{lon},{temp},"
                      f"{christ},{muslim},{na}\n")

    with open("panel.csv", "w") as out:
        out.write("country_id,period,export_vol,export_val,import_vol,"
                  "import_val,gdp_pc,eu_years,euro_years\n")
        for t, label in enumerate(PERIODS):
            exp_w = {c: EXPORT_W[c][t] * jitter[c][t] for c in ids}
            imp_w = {c: IMPORT_W[c][t] * jitter[c][(t + 4) % 9] for c in ids}
            exp_total_w = sum(exp_w.values())
            imp_total_w = sum(imp_w.values())
            world_exp = WORLD_EXPORT_VOL[t]
            world_imp = world_exp * IMPORT_OVER_EXPORT
            for cid in ids:
                ev = world_exp * exp_w[cid] / exp_total_w
                iv = world_imp * imp_w[cid] / imp_total_w
                p0, p1 = EXPORT_PRICE.get(cid, DEFAULT_EXPORT_PRICE)
                ep = p0 + (p1 - p0) * t / 8.0
                q0, q1 = IMPORT_PRICE.get(cid, DEFAULT_IMPORT_PRICE)
                ip = q0 + (q1 - q0) * t / 8.0
                base, growth = GDP[cid]
                gdp = base * (1.0 + growth) ** (5 * t)
                eu = years_in_window(cid, t, 1968, 1998, EU_ACCESSION)
                euro = years_in_window(cid, t, 1999, 2005, EURO_START)
                # volumes in kL, values in thousand USD (kL * USD/L)
                out.write(f"{cid},{label},{ev:.1f},{ev * ep:.1f},{iv:.1f},"
                          f"{iv * ip:.1f},{gdp:.1f},{eu},{euro}\n")

    # Note: rows are written period-major; the loader sorts by country.


if __name__ == "__main__":
    main()
