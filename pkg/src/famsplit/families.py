"""Canonical malware family names used to label synthetic matrices."""


# The 184 most frequent AVClass family labels, in the fixed order used
# throughout this package. Synthetic matrices with k <= 184 reuse the
# first k of these so toy data reads like real data.
FAMILY_NAMES = (
    "FOURshared", "adnur", "airinstaller", "allaple", "alman", "amonetize",
    "archsms", "ardamax", "autoit", "azero", "banbra", "bancos",
    "banload", "beebone", "bettersurf", "bifrose", "black", "blackhole",
    "bladabindi", "bredolab", "browsefox", "bundlore", "buterat", "buzus",
    "chir", "cidox", "cinmus", "constructor", "cosmu", "cycbot",
    "dapato", "darkkomet", "daws", "delf", "delfinject", "delphi",
    "directdownloader", "domaiq", "dorkbot", "downloadadmin", "downloadguide", "drstwex",
    "dsbot", "egroupdial", "eorezo", "expiro", "fakerean", "fareit",
    "farfli", "fearso", "firseria", "flystudio", "forcestartpage", "fosniw",
    "fraudload", "fraudpack", "fujacks", "gabpath", "gamarue", "gamevance",
    "gepys", "geral", "hiloti", "hlux", "hoax", "hotbar",
    "hupigon", "ibryte", "inbox", "installbrain", "installcore", "installerex",
    "installiq", "installmonetizer", "installmonster", "ircbot", "karagany", "kelihos",
    "klez", "kolab", "koobface", "koutodoor", "kraddare", "kykymber",
    "ldpinch", "lethic", "lineage", "linkular", "linkury", "lipler",
    "llac", "lmir", "loadmoney", "lollipop", "loring", "luder",
    "mabezat", "magania", "medfos", "mediaget", "megasearch", "menti",
    "monder", "morto", "mudrop", "multiplug", "mydoom", "nebuler",
    "netsky", "nsanti", "onlinegames", "opencandy", "outbrowse", "pakes",
    "palevo", "parite", "pasta", "patchload", "pcclient", "picsys",
    "pincav", "poison", "powp", "prorat", "qhost", "qqpass",
    "ramnit", "rbot", "rebhip", "refroso", "renos", "sality",
    "sasfis", "scar", "sdbot", "sefnit", "shipup", "shiz",
    "sillyfdc", "simda", "sinowal", "skintrim", "soft32downloader", "softonic",
    "softpulse", "somoto", "spyeye", "staget", "swisyn", "swizzor",
    "swrort", "sytro", "tdss", "tibs", "toggle", "trymedia",
    "turkojan", "unruy", "uptodown", "urelas", "usteal", "vapsup",
    "vbinder", "viking", "vilsel", "virlock", "virut", "vittalia",
    "vobfus", "vtflooder", "vundo", "wapomi", "webprefix", "winwebsec",
    "xpaj", "xtrat", "yakes", "zapchast", "zbot", "zegost",
    "zeroaccess", "zlob", "zusy", "zwangi",
)
